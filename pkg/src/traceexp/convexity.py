"""Finite certificates of exponential convexity.

A continuous ``f`` is exponentially convex when every matrix
``[f(t_r + t_s)]`` is positive semidefinite.  Only finitely many grids can
be tested, so every verdict here means "PSD on the grids tried".
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import DomainError, NoConvergence

__all__ = [
    "CERTIFIED",
    "VIOLATED",
    "INCONCLUSIVE",
    "GramReport",
    "gram_matrix",
    "min_eig_sym",
    "gram_report",
    "check_exp_convex",
    "aggregate_verdict",
    "hadamard_and_sum_checks",
    "sqrt_inequality_check",
]

CERTIFIED = "certified-psd"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

CERTIFY_TOL = 1e-9
VIOLATE_TOL = 1e-6
MAX_GRID = 64
MAX_SWEEPS = 100


@dataclass(frozen=True)
class GramReport:
    grid: Tuple[float, ...]
    gram: np.ndarray
    min_eigenvalue: float
    verdict: str
    tolerance: float = CERTIFY_TOL

    @property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.diag(self.gram)))) if len(self.grid) else 1.0

    def as_dict(self) -> dict:
        return {"grid": list(self.grid), "min_eig": self.min_eigenvalue, "verdict": self.verdict}


def gram_matrix(f: Callable[[float], float], grid: Sequence[float]) -> np.ndarray:
    """``G[r, s] = f(t_r + t_s)``, filled from the upper triangle so it is exactly symmetric."""
    grid = [float(t) for t in grid]
    if len(grid) > MAX_GRID:
        raise DomainError(f"grid has {len(grid)} points; at most {MAX_GRID} supported")
    if not all(math.isfinite(t) for t in grid):
        raise DomainError("grid points must be finite")
    m = len(grid)
    g = np.empty((m, m))
    for r in range(m):
        for s in range(r, m):
            g[r, s] = g[s, r] = f(grid[r] + grid[s])
    return g


def min_eig_sym(m: np.ndarray) -> float:
    """Smallest eigenvalue of a real symmetric matrix by cyclic Jacobi rotations."""
    a = np.array(m, dtype=float, copy=True)
    n = a.shape[0]
    if a.shape != (n, n) or n > MAX_GRID:
        raise DomainError(f"expected a square matrix of size <= {MAX_GRID}, got {a.shape}")
    if n == 0:
        raise DomainError("empty matrix")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix entries must be finite")
    threshold = 1e-14 * np.linalg.norm(a)
    for _ in range(MAX_SWEEPS):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= threshold:
            return float(np.min(np.diag(a)))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    # theta would overflow; tan of the rotation angle is ~ apq / diff
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = a[q, p] = 0.0
    raise NoConvergence(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")


def _verdict(min_eig: float, scale: float) -> str:
    if min_eig >= -CERTIFY_TOL * scale:
        return CERTIFIED
    if min_eig < -VIOLATE_TOL * scale:
        return VIOLATED
    return INCONCLUSIVE


def gram_report(f: Callable[[float], float], grid: Sequence[float]) -> GramReport:
    g = gram_matrix(f, grid)
    lo = min_eig_sym(g)
    scale = max(1.0, float(np.max(np.diag(g))))
    return GramReport(tuple(float(t) for t in grid), g, lo, _verdict(lo, scale))


def check_exp_convex(f: Callable[[float], float], grids: Iterable[Sequence[float]]) -> List[GramReport]:
    return [gram_report(f, grid) for grid in grids]


def aggregate_verdict(reports: Iterable[GramReport]) -> str:
    verdicts = {r.verdict for r in reports}
    if VIOLATED in verdicts:
        return VIOLATED
    if INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    return CERTIFIED


def hadamard_and_sum_checks(f1, f2, grids, c: float = 2.0, a: float = -1.0,
                            b: float = 0.3) -> Dict[str, str]:
    """Aggregate verdicts for the closure operations on two certified functions.

    Checks ``c*f1`` (``c >= 0``), ``f1 + f2``, ``f1 * f2`` and ``f1(a*t + b)``.
    """
    if c < 0:
        raise DomainError(f"scale factor must be non-negative, got {c}")
    grids = [list(g) for g in grids]
    candidates = {
        "scaled": lambda t: c * f1(t),
        "sum": lambda t: f1(t) + f2(t),
        "product": lambda t: f1(t) * f2(t),
        "affine": lambda t: f1(a * t + b),
    }
    return {name: aggregate_verdict(check_exp_convex(g, grids)) for name, g in candidates.items()}


def sqrt_inequality_check(f, pairs, rtol: float = 1e-12) -> dict:
    """Test ``f(t1 + t2) <= sqrt(f(2 t1) f(2 t2))`` on every pair.

    This is the 2x2 Gram minor condition: necessary for exponential
    convexity but far from sufficient.
    """
    failures = []
    worst = -math.inf
    for t1, t2 in pairs:
        lhs = f(t1 + t2)
        rhs = math.sqrt(f(2 * t1) * f(2 * t2))
        excess = lhs - rhs
        worst = max(worst, excess / max(abs(rhs), 1e-300))
        if excess > rtol * max(abs(rhs), abs(lhs)):
            failures.append((t1, t2, lhs, rhs))
    return {"holds": not failures, "failures": failures, "worst_relative_excess": worst}
