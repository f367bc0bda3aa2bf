import math

import numpy as np
import pytest

from traceexp.pauli import HermitianMatrix2, Matrix2
from traceexp.rng import SplitMix64, random_hermitian


def expm_series(h, terms=40):
    """Scaling-and-squaring of the truncated Taylor series; independent of herm_exp."""
    a = np.asarray(h.to_numpy() if hasattr(h, "to_numpy") else h, dtype=complex)
    norm = np.abs(a).sum(axis=1).max()
    s = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0 else 0
    a = a / 2**s
    out = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def rel_err(x, y):
    x, y = np.asarray(x), np.asarray(y)
    return float(np.max(np.abs(x - y)) / max(np.max(np.abs(y)), 1e-300))


def as_np(m):
    return m.to_numpy() if isinstance(m, (Matrix2, HermitianMatrix2)) else np.asarray(m)


@pytest.fixture
def hermitian_corpus():
    rng = SplitMix64(2024)
    return [(random_hermitian(rng), random_hermitian(rng)) for _ in range(200)]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
