"""Discrete representing measures from the Lie-product word expansion.

Expanding ``(exp(t*alpha*sigma/N) (I +/- beta*tau/N))**N`` letter by letter
gives words in ``exp(t*alpha*sigma/N)`` and ``+/-beta*tau/N``.  Averaging the
``+`` and ``-`` expansions cancels every word with an odd number of ``tau``
letters; a word with ``2l`` of them collapses to
``beta**(2l) * exp(t*alpha*mu*sigma)`` with ``mu = 1 - 2s/N``, where ``s`` is
the total length of the "flipped" stretches between paired ``tau`` letters.

The resulting atoms (location ``mu``, weight ``(beta/N)**(2l)``) form the
measure ``rho_N`` on ``[-1, 1]``.  :func:`build_rho_N` aggregates them by
``s`` with closed-form counts; :func:`rho_N_by_enumeration` walks every
admissible position set and is kept as an oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .closed_form import e1, e2
from .errors import DomainError, OddLengthError, RangeError, SizeGuardError
from .pauli import Matrix2, identity, mat_add, mat_mul, mat_scale, pauli_tau

__all__ = [
    "PositionSet",
    "DiscreteMeasure",
    "ENUMERATION_GUARD",
    "EXACT_COUNT_LIMIT",
    "enumerate_position_sets",
    "gap_sum",
    "atom_location",
    "gap_count",
    "build_rho_N",
    "rho_N_by_enumeration",
    "word_product",
    "eval_E_N_measure",
    "eval_E_N_direct",
    "closed_E",
    "convergence_table",
]

ENUMERATION_GUARD = 40
EXACT_COUNT_LIMIT = 60


@dataclass(frozen=True)
class PositionSet:
    """Positions ``p_1 < ... < p_m`` of the ``tau`` letters in a word of length ``n + m``."""

    n: int
    positions: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(int(p) for p in self.positions))
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")
        if not _admissible(self.n, self.positions):
            raise DomainError(f"inadmissible positions {self.positions} for n={self.n}")

    @property
    def m(self) -> int:
        return len(self.positions)


def _admissible(n: int, ps: Sequence[int]) -> bool:
    if not ps:
        return True
    if ps[0] <= 1 or ps[-1] > n + len(ps):
        return False
    return all(b > a + 1 for a, b in zip(ps, ps[1:]))


def enumerate_position_sets(n: int, m: int) -> List[PositionSet]:
    """Every admissible position set with ``m`` tau letters, by depth-first search.

    Admissible means ``1 < p_1``, ``p_j + 1 < p_{j+1}`` and ``p_m <= n + m``.
    """
    if not 0 <= m <= n:
        raise DomainError(f"need 0 <= m <= n, got n={n}, m={m}")
    if n + m > ENUMERATION_GUARD:
        raise SizeGuardError(f"n + m = {n + m} exceeds the enumeration guard {ENUMERATION_GUARD}")
    last = n + m
    out: List[PositionSet] = []

    def walk(prefix: List[int], lo: int) -> None:
        if len(prefix) == m:
            out.append(PositionSet(n, tuple(prefix)))
            return
        for p in range(lo, last + 1):
            prefix.append(p)
            walk(prefix, p + 2)
            prefix.pop()

    walk([], 2)
    return out


def gap_sum(ps: PositionSet) -> int:
    """Total flipped length ``s = sum_j (p_{2j} - p_{2j-1} - 1)``."""
    if ps.m % 2:
        raise OddLengthError(f"position set has odd length {ps.m}")
    p = ps.positions
    return sum(p[2 * j + 1] - p[2 * j] - 1 for j in range(ps.m // 2))


def atom_location(ps: PositionSet) -> float:
    """``mu = (2p_1 - 2p_2 + ... - 2p_{2l} + N + 2l) / N``."""
    if ps.m % 2:
        raise OddLengthError(f"position set has odd length {ps.m}")
    alt = sum(2 * p if j % 2 == 0 else -2 * p for j, p in enumerate(ps.positions))
    return (alt + ps.n + ps.m) / ps.n


def gap_count(n: int, l: int, s: int) -> int:
    """Number of ``2l``-letter position sets over ``n`` with gap sum ``s``.

    Closed form ``C(s-1, l-1) * C(n-s, l)``: ``l`` flipped gaps of length at
    least 1 summing to ``s``, and ``l + 1`` unflipped stretches filling the
    remaining ``n - s`` exponential letters.
    """
    if not 1 <= l <= n // 2:
        raise RangeError(f"need 1 <= l <= n/2, got n={n}, l={l}")
    if not l <= s <= n - l:
        raise RangeError(f"s={s} outside [{l}, {n - l}] (count is 0 there)")
    return math.comb(s - 1, l - 1) * math.comb(n - s, l)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite non-negative atomic measure on ``[-1, 1]``.

    Atoms sit on the grid ``mu = 1 - 2s/n`` and are stored sorted by
    ascending location (descending ``s``).
    """

    n: int
    beta: float
    s: np.ndarray
    weights: np.ndarray
    locations: np.ndarray = field(init=False)

    def __post_init__(self):
        s = np.asarray(self.s, dtype=np.int64)
        w = np.asarray(self.weights, dtype=float)
        order = np.argsort(-s, kind="stable")
        s, w = s[order], w[order]
        if np.any(w < 0):
            raise DomainError("measure weights must be non-negative")
        if len(np.unique(s)) != len(s):
            raise DomainError("atom locations must be unique")
        s.flags.writeable = False
        w.flags.writeable = False
        loc = 1.0 - 2.0 * s / self.n
        loc.flags.writeable = False
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "locations", loc)

    def __len__(self) -> int:
        return len(self.s)

    def atoms(self) -> List[Tuple[float, float]]:
        return list(zip(self.locations.tolist(), self.weights.tolist()))

    def total_mass(self) -> float:
        return math.fsum(self.weights)

    def moment(self, k: int) -> float:
        return math.fsum(self.weights * self.locations**k)

    def laplace(self, x: float) -> float:
        """``sum_i w_i exp(x * mu_i)``."""
        return math.fsum(self.weights * np.exp(x * self.locations))

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "beta": self.beta,
            "atoms": [
                {"s": int(s), "mu": float(mu), "weight": float(w)}
                for s, mu, w in zip(self.s, self.locations, self.weights)
            ],
            "mass": self.total_mass(),
        }


def _slice_weights_exact(n: int, l: int, beta: float):
    s = np.arange(l, n - l + 1)
    scale = (beta / n) ** (2 * l)
    w = np.array([float(math.comb(k - 1, l - 1) * math.comb(n - k, l)) * scale for k in s])
    return s, w


def _slice_weights_log(n: int, l: int, beta: float):
    # log C(n-l, l) as an interleaved product, then log-ratios along s.
    k = np.arange(1, l + 1)
    log_start = np.sum(np.log((n - 2 * l + k) / k)) + 2 * l * math.log(beta / n)
    s = np.arange(l, n - l + 1)
    head = s[:-1]
    steps = np.log(head / (head - l + 1)) + np.log((n - head - l) / (n - head))
    logs = log_start + np.concatenate(([0.0], np.cumsum(steps)))
    return s, np.exp(logs)


def build_rho_N(n: int, beta: float) -> DiscreteMeasure:
    """Aggregated measure ``rho_N``: O(n^2) work instead of 2^n words.

    Slices are accumulated in ascending ``l`` onto the integer ``s`` grid so
    the result is bit-reproducible.  Counts are exact integers for
    ``n <= EXACT_COUNT_LIMIT``; above that weights come from summed
    log-ratios so that neither the binomials nor ``(beta/n)**(2l)`` overflow.
    Slices whose total mass underflows to zero are skipped.
    """
    n = int(n)
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0:
        raise DomainError(f"beta must be finite and >= 0, got {beta}")

    acc = np.zeros(n, dtype=float)
    acc[0] = 1.0
    if beta > 0:
        for l in range(1, n // 2 + 1):
            log_mass = (
                math.lgamma(n + 1) - math.lgamma(2 * l + 1) - math.lgamma(n - 2 * l + 1)
                + 2 * l * math.log(beta / n)
            )
            if log_mass < -745.0:
                # Slice masses decay like beta^(2l)/(2l)! once past the peak.
                if 2 * l > beta:
                    break
                continue
            if n <= EXACT_COUNT_LIMIT:
                s, w = _slice_weights_exact(n, l, beta)
            else:
                s, w = _slice_weights_log(n, l, beta)
            acc[s] += w
    keep = np.flatnonzero(acc > 0)
    return DiscreteMeasure(n=n, beta=beta, s=keep, weights=acc[keep])


def rho_N_by_enumeration(n: int, beta: float) -> DiscreteMeasure:
    """Same measure as :func:`build_rho_N`, one atom per even position set."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    weights = {0: 1.0}
    for l in range(1, n // 2 + 1):
        scale = (beta / n) ** (2 * l)
        for ps in enumerate_position_sets(n, 2 * l):
            key = gap_sum(ps)
            weights[key] = weights.get(key, 0.0) + scale
    keys = sorted(k for k, w in weights.items() if w > 0)
    return DiscreteMeasure(n=n, beta=beta, s=keys, weights=[weights[k] for k in keys])


def _exp_sigma(x: float) -> Matrix2:
    return Matrix2(math.exp(x), 0, 0, math.exp(-x))


def word_product(ps: PositionSet, t: float, alpha: float, beta: float, sign: int = 1) -> Matrix2:
    """Multiply out one word letter by letter.

    Letters are ``exp(t*alpha*sigma/N)`` everywhere except at ``ps.positions``,
    which carry ``sign*beta*tau``.  The ``1/N**m`` factor is not included.
    """
    step = _exp_sigma(t * alpha / ps.n)
    flip = mat_scale(sign * beta, pauli_tau().to_matrix())
    taus = set(ps.positions)
    out = identity()
    for k in range(1, ps.n + ps.m + 1):
        out = mat_mul(out, flip if k in taus else step)
    return out


def eval_E_N_measure(t: float, alpha: float, measure: DiscreteMeasure) -> Matrix2:
    """``diag(int e^{t alpha mu} d rho, int e^{-t alpha mu} d rho)``."""
    x = float(t) * float(alpha)
    return Matrix2(measure.laplace(x), 0, 0, measure.laplace(-x))


def _mat_pow(m: Matrix2, n: int) -> Matrix2:
    out = identity()
    while n:
        if n & 1:
            out = mat_mul(out, m)
        n >>= 1
        if n:
            m = mat_mul(m, m)
    return out


def eval_E_N_direct(t: float, alpha: float, beta: float, n: int) -> Matrix2:
    """``(E_N^+ + E_N^-)/2`` with ``E_N^{+/-} = (exp(t alpha sigma/n)(I +/- beta tau/n))**n``."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    step = _exp_sigma(t * alpha / n)
    shift = mat_scale(beta / n, pauli_tau().to_matrix())
    plus = _mat_pow(mat_mul(step, mat_add(identity(), shift)), n)
    minus = _mat_pow(mat_mul(step, mat_add(identity(), mat_scale(-1, shift))), n)
    return mat_scale(0.5, mat_add(plus, minus))


def closed_E(t: float, alpha: float, beta: float) -> Matrix2:
    """Limit matrix ``E(t; alpha, beta) = diag(e1(alpha t, beta), e2(alpha t, beta))``."""
    x = float(t) * float(alpha)
    return Matrix2(e1(x, beta), 0, 0, e2(x, beta))


def convergence_table(alpha: float, beta: float, t: float, n_list: Sequence[int]) -> List[Tuple[int, float]]:
    """``(n, max|E_n - E|)`` for each ``n``; ``n_list`` must be ascending."""
    n_list = [int(n) for n in n_list]
    if n_list != sorted(n_list):
        raise DomainError("n_list must be ascending")
    target = closed_E(t, alpha, beta)
    return [(n, (eval_E_N_direct(t, alpha, beta, n) - target).max_abs()) for n in n_list]


def iter_even_position_sets(n: int) -> Iterator[PositionSet]:
    for l in range(0, n // 2 + 1):
        yield from enumerate_position_sets(n, 2 * l)
