"""Closed-form targets and the Bessel-density representing measure.

The limit matrix ``E(t; beta) = (exp(t sigma + beta tau) + exp(t sigma - beta tau)) / 2``
is ``diag(e1(t, beta), e2(t, beta))``, and both diagonal entries are
bilateral Laplace transforms of the measure

    rho(dmu) = delta(mu - 1) dmu + (1 + mu) * dhat(mu, beta) dmu,
    dhat(mu, beta) = beta / (2 sqrt(1 - mu^2)) * I1(beta sqrt(1 - mu^2)),

on ``[-1, 1]``.  Transforms of the continuous part are evaluated with
composite Gauss-Legendre quadrature.  :func:`spectral_measure` pushes ``rho``
forward to the measure representing ``tr exp(tA + B)`` for any Hermitian
pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Tuple

import numpy as np

from .errors import DomainError, QuadratureNoConvergence
from .pauli import HermitianMatrix2, _split_weights
from .reduction import CanonicalDecomposition, reduce

__all__ = [
    "f_closed",
    "e1",
    "e2",
    "bessel_I1",
    "bessel_i1_array",
    "density_dhat",
    "density_dhat_array",
    "gauss_legendre",
    "HybridMeasure",
    "rho_closed",
    "laplace_eval",
    "ContinuousPiece",
    "SpectralMeasure",
    "spectral_measure",
]

BESSEL_ZMAX = 100.0
ENDPOINT_EPS = 1e-12
QUAD_ORDER = 32
QUAD_RTOL = 1e-11
QUAD_MAX_PANELS = 2**10


def f_closed(alpha: float, beta: float, t: float) -> float:
    """``2 cosh(sqrt(alpha^2 t^2 + beta^2))``."""
    return 2.0 * math.cosh(math.hypot(alpha * t, beta))


def e1(t: float, beta: float) -> float:
    """``cosh R + t sinh(R)/R`` with ``R = sqrt(t^2 + beta^2)``."""
    return _diag_entry(t, beta)


def e2(t: float, beta: float) -> float:
    """``cosh R - t sinh(R)/R``; equals ``e1(-t, beta)``."""
    return _diag_entry(-t, beta)


def _diag_entry(t: float, beta: float) -> float:
    r = math.hypot(t, beta)
    if r == 0.0:
        return 1.0
    # (1 + t/R) e^R / 2 + (1 - t/R) e^-R / 2, both weights non-negative.
    p, q = _split_weights(t, beta, r)
    return p * math.exp(r) + q * math.exp(-r)


def bessel_I1(z: float) -> float:
    """Modified Bessel function ``I1`` by its power series, ``0 <= z <= 100``."""
    z = float(z)
    if not (0.0 <= z <= BESSEL_ZMAX):
        raise DomainError(f"bessel_I1 needs 0 <= z <= {BESSEL_ZMAX}, got {z}")
    half = 0.5 * z
    q = half * half
    term = half
    total = term
    k = 0
    while term > 1e-17 * total:
        k += 1
        term *= q / (k * (k + 1))
        total += term
    return total


def bessel_i1_array(z) -> np.ndarray:
    """Vectorised :func:`bessel_I1` (same series, same stopping rule)."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z > BESSEL_ZMAX) or not np.all(np.isfinite(z)):
        raise DomainError(f"bessel_i1_array needs 0 <= z <= {BESSEL_ZMAX}")
    half = 0.5 * z
    q = half * half
    term = half.copy()
    total = term.copy()
    k = 0
    while np.any(term > 1e-17 * total):
        k += 1
        term = term * (q / (k * (k + 1)))
        total = total + term
    return total


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0:
        raise DomainError(f"beta must be finite and >= 0, got {beta}")
    return beta


def density_dhat(mu: float, beta: float) -> float:
    """``beta/(2 sqrt(1-mu^2)) * I1(beta sqrt(1-mu^2))``; ``beta^2/4`` at ``mu = +/-1``."""
    mu = float(mu)
    beta = _check_beta(beta)
    if not abs(mu) <= 1.0:
        raise DomainError(f"density_dhat needs |mu| <= 1, got {mu}")
    u = (1.0 - mu) * (1.0 + mu)
    if u < ENDPOINT_EPS:
        return 0.25 * beta * beta * (1.0 + beta * beta * u / 8.0)
    root = math.sqrt(u)
    return beta / (2.0 * root) * bessel_I1(beta * root)


def density_dhat_array(mu, beta: float) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    beta = _check_beta(beta)
    if np.any(np.abs(mu) > 1.0) or not np.all(np.isfinite(mu)):
        raise DomainError("density_dhat_array needs |mu| <= 1")
    u = (1.0 - mu) * (1.0 + mu)
    near = u < ENDPOINT_EPS
    root = np.sqrt(np.where(near, 1.0, u))
    bulk = beta / (2.0 * root) * bessel_i1_array(beta * root)
    edge = 0.25 * beta * beta * (1.0 + beta * beta * u / 8.0)
    return np.where(near, edge, bulk)


@lru_cache(maxsize=8)
def _legendre_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def _composite(f, a: float, b: float, panels: int, order: int) -> float:
    x, w = _legendre_nodes(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    pts = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    return float(np.sum(half * (vals @ w)))


def gauss_legendre(f, a: float, b: float, rtol: float = QUAD_RTOL,
                   order: int = QUAD_ORDER, max_panels: int = QUAD_MAX_PANELS) -> float:
    """Composite Gauss-Legendre integral of a vectorised ``f`` over ``[a, b]``.

    Panels are halved until two successive estimates agree to ``rtol``.
    """
    panels = 1
    prev = _composite(f, a, b, panels, order)
    while panels < max_panels:
        panels *= 2
        cur = _composite(f, a, b, panels, order)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    raise QuadratureNoConvergence(
        f"no agreement to rtol={rtol} on [{a}, {b}] within {max_panels} panels"
    )


@dataclass(frozen=True)
class HybridMeasure:
    """Point mass at ``mu = 1`` plus a non-negative density on ``[-1, 1]``."""

    atom_weight_at_one: float
    beta: float
    density: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    def integrate(self, g) -> float:
        """``g(1) * atom + int g(mu) density(mu) dmu`` for vectorised ``g``."""
        atom = self.atom_weight_at_one * float(g(np.array([1.0]))[0])
        if self.beta == 0.0:
            return atom
        return atom + gauss_legendre(lambda mu: g(mu) * self.density(mu), -1.0, 1.0)

    def mass(self) -> float:
        return self.integrate(np.ones_like)

    def moment(self, k: int) -> float:
        return self.integrate(lambda mu: mu**k)

    def density_table(self, points: int = 1001) -> List[Tuple[float, float]]:
        mu = np.linspace(-1.0, 1.0, points)
        return list(zip(mu.tolist(), np.asarray(self.density(mu), dtype=float).tolist()))

    def as_dict(self, points: int = 1001) -> dict:
        return {
            "type": "hybrid",
            "beta": self.beta,
            "atoms": [{"mu": 1.0, "weight": self.atom_weight_at_one}],
            "density_grid": [[m, d] for m, d in self.density_table(points)],
            "mass": self.mass(),
        }


def rho_closed(beta: float) -> HybridMeasure:
    beta = _check_beta(beta)
    return HybridMeasure(
        atom_weight_at_one=1.0,
        beta=beta,
        density=lambda mu: (1.0 + mu) * density_dhat_array(mu, beta),
    )


def laplace_eval(m: HybridMeasure, t: float, sign: int = 1) -> float:
    """``int exp(sign * t * mu) m(dmu)``; ``sign=+1`` gives ``e1``, ``-1`` gives ``e2``."""
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    x = sign * float(t)
    if not math.isfinite(x):
        raise DomainError(f"t must be finite, got {t}")
    return m.integrate(lambda mu: np.exp(x * mu))


@dataclass(frozen=True)
class ContinuousPiece:
    """Density ``density(nu)`` supported on ``[lo, hi]``."""

    lo: float
    hi: float
    density: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    def integrate(self, g) -> float:
        if self.hi <= self.lo:
            return 0.0
        return gauss_legendre(lambda nu: g(nu) * self.density(nu), self.lo, self.hi)


@dataclass(frozen=True)
class SpectralMeasure:
    """Representing measure of ``t -> tr exp(tA + B)`` on the real line."""

    support_lo: float
    support_hi: float
    atoms: Tuple[Tuple[float, float], ...]
    pieces: Tuple[ContinuousPiece, ...] = ()

    def integrate(self, g) -> float:
        total = math.fsum(w * float(g(np.array([nu]))[0]) for nu, w in self.atoms)
        return total + math.fsum(p.integrate(g) for p in self.pieces)

    def mass(self) -> float:
        return self.integrate(np.ones_like)

    def laplace(self, t: float) -> float:
        """Bilateral Laplace transform ``int exp(t nu) dsigma(nu)``."""
        t = float(t)
        return self.integrate(lambda nu: np.exp(t * nu))

    def density_table(self, points: int = 1001) -> List[Tuple[float, float]]:
        nu = np.linspace(self.support_lo, self.support_hi, points)
        dens = np.zeros_like(nu)
        for p in self.pieces:
            inside = (nu >= p.lo) & (nu <= p.hi)
            if np.any(inside):
                dens[inside] += p.density(nu[inside])
        return list(zip(nu.tolist(), dens.tolist()))

    def as_dict(self, points: int = 1001) -> dict:
        return {
            "type": "spectral",
            "support": [self.support_lo, self.support_hi],
            "atoms": [{"nu": nu, "weight": w} for nu, w in self.atoms],
            "density_grid": [[x, d] for x, d in self.density_table(points)],
            "mass": self.mass(),
        }


def _image_density(dec: CanonicalDecomposition, sign: int):
    # nu = lam + sign*alpha*mu carries mass c e^{sign t0 alpha mu} rho(dmu).
    lam, alpha, beta, c, t0 = dec.lam, dec.alpha, dec.beta, dec.c, dec.t0

    def density(nu):
        mu = np.clip(sign * (np.asarray(nu, dtype=float) - lam) / alpha, -1.0, 1.0)
        tilt = np.exp(sign * t0 * alpha * mu)
        return c * tilt * (1.0 + mu) * density_dhat_array(mu, beta) / alpha

    return density


def spectral_measure(a, b) -> SpectralMeasure:
    """Push the Bessel-density measure through the reduction of ``(A, B)``.

    Support is ``[lam - alpha, lam + alpha]``, the eigenvalue interval of A.
    """
    a, b = HermitianMatrix2.coerce(a), HermitianMatrix2.coerce(b)
    dec = reduce(a, b)
    lam, alpha = dec.lam, dec.alpha
    if dec.degenerate or alpha == 0.0:
        mass = dec.c * 2.0 * math.cosh(dec.beta)
        return SpectralMeasure(lam, lam, ((lam, mass),))
    shift = dec.t0 * alpha
    atoms = (
        (lam - alpha, dec.c * math.exp(-shift)),
        (lam + alpha, dec.c * math.exp(shift)),
    )
    pieces: Tuple[ContinuousPiece, ...] = ()
    if dec.beta > 0.0:
        pieces = tuple(
            ContinuousPiece(lam - alpha, lam + alpha, _image_density(dec, s)) for s in (1, -1)
        )
    return SpectralMeasure(lam - alpha, lam + alpha, atoms, pieces)
