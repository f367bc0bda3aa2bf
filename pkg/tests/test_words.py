import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from traceexp.errors import DomainError, OddLengthError, RangeError, SizeGuardError
from traceexp.pauli import Matrix2, herm_exp, identity, mat_add, mat_mul, mat_scale, pauli_sigma, pauli_tau
from traceexp.words import (
    DiscreteMeasure,
    PositionSet,
    atom_location,
    build_rho_N,
    closed_E,
    convergence_table,
    enumerate_position_sets,
    eval_E_N_direct,
    eval_E_N_measure,
    gap_count,
    gap_sum,
    rho_N_by_enumeration,
    word_product,
)

from conftest import as_np


def brute_force_sets(n, m):
    """Filter every m-subset of {1..n+m} against the admissibility rules."""
    out = []
    for c in itertools.combinations(range(1, n + m + 1), m):
        if m and c[0] <= 1:
            continue
        if all(b > a + 1 for a, b in zip(c, c[1:])):
            out.append(c)
    return out


def expansion_oracle(t, alpha, beta, n, sign):
    """Sum all 2^n products e^{X/n} M_eps ... without grouping."""
    step = Matrix2(math.exp(t * alpha / n), 0, 0, math.exp(-t * alpha / n))
    flip = mat_scale(sign * beta / n, pauli_tau().to_matrix())
    total = Matrix2(0, 0, 0, 0)
    for eps in itertools.product((0, 1), repeat=n):
        w = identity()
        for e in eps:
            w = mat_mul(mat_mul(w, step), flip if e else identity())
        total = mat_add(total, w)
    return total


def test_enumerate_examples():
    sets = enumerate_position_sets(4, 2)
    assert [ps.positions for ps in sets] == [(2, 4), (2, 5), (2, 6), (3, 5), (3, 6), (4, 6)]
    assert [ps.positions for ps in enumerate_position_sets(5, 0)] == [()]
    assert [ps.positions for ps in enumerate_position_sets(3, 3)] == [(2, 4, 6)]


@pytest.mark.parametrize("n", range(1, 13))
def test_enumeration_matches_brute_force_and_binomial(n):
    for m in range(n + 1):
        sets = [ps.positions for ps in enumerate_position_sets(n, m)]
        assert len(sets) == math.comb(n, m)
        assert sets == brute_force_sets(n, m)


def test_enumeration_guards():
    with pytest.raises(SizeGuardError):
        enumerate_position_sets(30, 11)
    with pytest.raises(DomainError):
        enumerate_position_sets(3, 4)


def test_position_set_validation():
    with pytest.raises(DomainError):
        PositionSet(4, (1, 3))
    with pytest.raises(DomainError):
        PositionSet(4, (2, 3))
    with pytest.raises(DomainError):
        PositionSet(2, (2, 5))


def test_atom_location_examples():
    assert atom_location(PositionSet(4, (2, 4))) == 0.5
    assert atom_location(PositionSet(4, (2, 6))) == -0.5
    for n in (1, 4, 9):
        assert atom_location(PositionSet(n, ())) == 1.0
    with pytest.raises(OddLengthError):
        atom_location(PositionSet(4, (3,)))


@pytest.mark.parametrize("n", range(2, 13))
def test_atom_location_range_and_gap_form(n):
    lo = -(1 - 2 / n)
    for l in range(0, n // 2 + 1):
        for ps in enumerate_position_sets(n, 2 * l):
            mu = atom_location(ps)
            assert lo - 1e-15 <= mu <= 1.0
            assert mu == pytest.approx(1 - 2 * gap_sum(ps) / n, abs=1e-15)


def test_gap_count_examples():
    assert gap_count(4, 1, 1) == 3
    assert gap_count(4, 1, 2) == 2
    assert gap_count(4, 1, 3) == 1
    with pytest.raises(RangeError):
        gap_count(4, 1, 4)
    with pytest.raises(RangeError):
        gap_count(4, 3, 3)


@pytest.mark.parametrize("n", range(2, 15))
def test_gap_count_matches_enumeration(n):
    for l in range(1, n // 2 + 1):
        counted = {}
        for ps in enumerate_position_sets(n, 2 * l):
            s = gap_sum(ps)
            counted[s] = counted.get(s, 0) + 1
        closed = {s: gap_count(n, l, s) for s in range(l, n - l + 1)}
        assert {s: c for s, c in closed.items() if c} == counted
        assert sum(closed.values()) == math.comb(n, 2 * l)


def test_build_rho_4_1():
    m = build_rho_N(4, 1.0)
    # l = 1 gives (3, 2, 1)/16 at mu = 1/2, 0, -1/2; l = 2 adds 1/256 at mu = 0.
    expected = [(-0.5, 1 / 16), (0.0, 2 / 16 + 1 / 256), (0.5, 3 / 16), (1.0, 1.0)]
    assert m.atoms() == pytest.approx(expected, rel=1e-15)
    assert m.total_mass() == pytest.approx(1 + 6 / 16 + 1 / 256, rel=1e-15)
    assert m.total_mass() < math.e


def test_mass_equals_binomial_sum_exactly_small_n():
    for n in range(2, 13):
        beta = Fraction(3, 2)
        exact = sum(math.comb(n, 2 * l) * (beta / n) ** (2 * l) for l in range(n // 2 + 1))
        assert build_rho_N(n, 1.5).total_mass() == pytest.approx(float(exact), rel=1e-14)


def test_build_rho_zero_beta():
    for n in (2, 7, 100):
        m = build_rho_N(n, 0.0)
        assert m.atoms() == [(1.0, 1.0)]


def count_table_by_enumeration(n):
    table = {}
    for l in range(1, n // 2 + 1):
        for ps in enumerate_position_sets(n, 2 * l):
            key = (l, gap_sum(ps))
            table[key] = table.get(key, 0) + 1
    return table


@pytest.mark.parametrize("n", range(2, 15))
def test_aggregated_equals_enumerated(n):
    closed = {(l, s): gap_count(n, l, s) for l in range(1, n // 2 + 1) for s in range(l, n - l + 1)}
    assert closed == count_table_by_enumeration(n)
    for beta in (0.5, 1.0, 3.0):
        fast, slow = build_rho_N(n, beta), rho_N_by_enumeration(n, beta)
        assert list(fast.s) == list(slow.s)
        # The enumerated route adds (beta/n)^(2l) once per set, so rounding differs slightly.
        np.testing.assert_allclose(fast.weights, slow.weights, rtol=1e-13, atol=0)


@pytest.mark.parametrize("n", [61, 64, 100])
def test_log_path_matches_exact_counts(n):
    # Above the exact-integer limit the weights come from summed log ratios.
    beta = 2.5
    m = build_rho_N(n, beta)
    exact = np.zeros(n)
    exact[0] = 1.0
    for l in range(1, n // 2 + 1):
        for s in range(l, n - l + 1):
            exact[s] += float(Fraction(gap_count(n, l, s)) * (Fraction(beta) / n) ** (2 * l))
    keep = np.flatnonzero(exact > 0)[::-1]
    assert list(m.s) == list(keep)
    np.testing.assert_allclose(m.weights, exact[keep], rtol=1e-12)


def test_build_rho_is_deterministic():
    a, b = build_rho_N(1024, 2.0), build_rho_N(1024, 2.0)
    assert a.weights.tobytes() == b.weights.tobytes()


@pytest.mark.parametrize("n", [4, 16, 64, 256, 1024])
def test_mass_bound_and_support(n):
    for beta in (0.5, 1.0, 2.0, 4.0):
        m = build_rho_N(n, beta)
        assert np.all(m.weights >= 0)
        assert m.total_mass() < math.exp(beta)
        assert m.total_mass() <= (1 + beta / n) ** n * (1 + 1e-12)
        assert m.locations.min() >= -(1 - 2 / n) - 1e-15
        assert m.locations.max() <= 1.0


def test_discrete_measure_validation():
    with pytest.raises(DomainError):
        DiscreteMeasure(n=4, beta=1.0, s=[0, 1], weights=[1.0, -0.5])
    with pytest.raises(DomainError):
        DiscreteMeasure(n=4, beta=1.0, s=[1, 1], weights=[1.0, 0.5])
    m = DiscreteMeasure(n=4, beta=1.0, s=[0, 3, 1], weights=[1.0, 0.2, 0.1])
    assert list(m.locations) == [-0.5, 0.5, 1.0]


@pytest.mark.parametrize("n", range(1, 9))
def test_odd_words_cancel_and_even_words_collapse(n):
    t, alpha, beta = 0.7, 1.3, 0.9
    for m in range(n + 1):
        for ps in enumerate_position_sets(n, m):
            plus = word_product(ps, t, alpha, beta, +1)
            minus = word_product(ps, t, alpha, beta, -1)
            if m % 2:
                assert mat_add(plus, minus).max_abs() <= 1e-15 * plus.max_abs()
            else:
                target = mat_scale(beta**m, herm_exp(pauli_sigma() * (t * alpha * atom_location(ps))))
                np.testing.assert_allclose(as_np(plus), as_np(target), rtol=1e-13, atol=1e-15)
                assert plus == minus


def test_odd_words_cancel_exactly_with_dyadic_entries():
    # t = 0 makes every exponential letter the identity, so all arithmetic is exact.
    for ps in enumerate_position_sets(5, 3):
        total = mat_add(word_product(ps, 0.0, 1.0, 0.5, +1), word_product(ps, 0.0, 1.0, 0.5, -1))
        assert total == Matrix2(0, 0, 0, 0)


@pytest.mark.parametrize("n", range(1, 9))
def test_direct_product_matches_full_expansion(n):
    for t in (-1.5, 0.8):
        for sign in (1, -1):
            oracle = expansion_oracle(t, 1.2, 0.7, n, sign)
            step = Matrix2(math.exp(t * 1.2 / n), 0, 0, math.exp(-t * 1.2 / n))
            factor = mat_mul(step, mat_add(identity(), mat_scale(sign * 0.7 / n, pauli_tau().to_matrix())))
            direct = identity()
            for _ in range(n):
                direct = mat_mul(direct, factor)
            np.testing.assert_allclose(as_np(direct), as_np(oracle), rtol=1e-13)
        avg = mat_scale(0.5, mat_add(expansion_oracle(t, 1.2, 0.7, n, 1), expansion_oracle(t, 1.2, 0.7, n, -1)))
        np.testing.assert_allclose(as_np(eval_E_N_direct(t, 1.2, 0.7, n)), as_np(avg), rtol=1e-13, atol=1e-15)


def test_eval_E_N_examples():
    m = build_rho_N(6, 1.7)
    e0 = eval_E_N_measure(0.0, 1.0, m)
    assert e0 == Matrix2(m.total_mass(), 0, 0, m.total_mass())
    single = DiscreteMeasure(n=2, beta=0.0, s=[0], weights=[1.0])
    assert eval_E_N_measure(2.0, 1.0, single) == Matrix2(math.exp(2), 0, 0, math.exp(-2))
    np.testing.assert_allclose(as_np(eval_E_N_direct(0.0, 1.0, 1.0, 2)), np.diag([1.25, 1.25]), rtol=1e-15)
    for n in (1, 5, 40):
        np.testing.assert_allclose(as_np(eval_E_N_direct(0.9, 1.1, 0.0, n)),
                                   as_np(herm_exp(pauli_sigma() * 0.99)), rtol=1e-14)
    a, b = eval_E_N_direct(1.0, 1.0, 1.0, 4), eval_E_N_measure(1.0, 1.0, build_rho_N(4, 1.0))
    np.testing.assert_allclose(as_np(a), as_np(b), rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 8, 33, 64, 100, 256])
def test_measure_and_direct_agree(n):
    for beta in (0.5, 2.0, 4.0):
        m = build_rho_N(n, beta)
        for t in (-4.0, -1.0, 0.5, 4.0):
            direct = eval_E_N_direct(t, 1.0, beta, n)
            via = eval_E_N_measure(t, 1.0, m)
            scale = direct.max_abs()
            assert abs(direct.m12) <= 1e-12 * scale and abs(direct.m21) <= 1e-12 * scale
            assert abs(direct.m11 - via.m11) <= 1e-11 * abs(via.m11)
            assert abs(direct.m22 - via.m22) <= 1e-11 * abs(via.m22)


def test_convergence_table_beta_zero_exact():
    # Error grows like n * ulp from powering a rounded exponential; fine to n = 512.
    for _, err in convergence_table(1.0, 0.0, 1.0, [2, 8, 64, 128, 256, 512]):
        assert err <= 1e-13


def test_convergence_table_first_order():
    table = convergence_table(1.0, 1.0, 1.0, [64, 128, 256, 512])
    errs = [e for _, e in table]
    for a, b in zip(errs, errs[1:]):
        assert 1.7 <= a / b <= 2.3
    assert errs[-1] <= 1e-2


def test_convergence_table_requires_ascending():
    with pytest.raises(DomainError):
        convergence_table(1.0, 1.0, 1.0, [128, 64])


def test_closed_E_matches_matrix_average():
    t, beta = 0.8, 1.4
    avg = mat_scale(0.5, mat_add(herm_exp(pauli_sigma() * t + pauli_tau() * beta),
                                 herm_exp(pauli_sigma() * t - pauli_tau() * beta)))
    np.testing.assert_allclose(as_np(closed_E(t, 1.0, beta)), as_np(avg), rtol=1e-13, atol=1e-15)


def test_as_dict_schema():
    d = build_rho_N(4, 1.0).as_dict()
    assert set(d) == {"n", "beta", "atoms", "mass"}
    assert d["atoms"][-1] == {"s": 0, "mu": 1.0, "weight": 1.0}
    assert set(d["atoms"][0]) == {"s", "mu", "weight"}
