"""Reduction of an arbitrary Hermitian pair to the Pauli pair.

For Hermitian 2x2 ``A`` and ``B`` the trace-exponential function
``f(t) = tr exp(tA + B)`` can always be rewritten as

    f(t) = c * exp(t*lam) * 2*cosh(sqrt(alpha**2 * (t + t0)**2 + beta**2))

with ``c > 0``, ``alpha >= 0`` and ``beta >= 0``.  :func:`reduce` computes
those scalars together with the unitary ``U`` that carries the traceless
parts of ``A`` and ``B`` onto ``alpha*sigma`` and ``beta*tau``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DegenerateAError
from .pauli import (
    HermitianMatrix2,
    Matrix2,
    adjoint,
    eigen2,
    herm_exp,
    pauli_sigma,
    pauli_tau,
    trace,
)

__all__ = [
    "CanonicalDecomposition",
    "DEGENERATE_TOL",
    "traceless_split",
    "compute_t0",
    "reduce",
    "f_direct",
    "f_canonical",
]

# tr(A0^2) at or below this counts as A0 == 0 (squared-norm scale).
DEGENERATE_TOL = 1e-24

_HADAMARD = Matrix2(1, 1, 1, -1) * (1 / math.sqrt(2.0))


@dataclass(frozen=True)
class CanonicalDecomposition:
    """Scalars and unitary realising ``f_{A,B}(t) = c e^{t lam} f_{alpha sigma, beta tau}(t + t0)``.

    In the degenerate case (``A`` a multiple of the identity) ``alpha`` is 0,
    ``t0`` is 0 and ``beta`` holds the half-spread of the eigenvalues of
    ``B``, so the same formula still applies.
    """

    lam: float
    mu: float
    t0: float
    c: float
    alpha: float
    beta: float
    U: Matrix2
    degenerate: bool = False

    def canonical_pair(self):
        """``(U* alpha sigma U, U* beta tau U)``: the reconstructed ``A0, B0``."""
        u, us = self.U, adjoint(self.U)
        a0 = us @ (pauli_sigma().to_matrix() * self.alpha) @ u
        b0 = us @ (pauli_tau().to_matrix() * self.beta) @ u
        return a0, b0

    def trace_residuals(self):
        """``(|tr A0|, |tr B0|, |tr A0 B0|)`` of the reconstructed pair."""
        a0, b0 = self.canonical_pair()
        return abs(trace(a0)), abs(trace(b0)), abs(trace(a0 @ b0))

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "mu": self.mu,
            "t0": self.t0,
            "c": self.c,
            "alpha": self.alpha,
            "beta": self.beta,
            "U": [[[z.real, z.imag] for z in row] for row in self.U.rows()],
            "degenerate": self.degenerate,
        }


def traceless_split(a: HermitianMatrix2):
    """Split ``a = lam*I + a0`` with ``tr(a0) == 0``."""
    a = HermitianMatrix2.coerce(a)
    lam = 0.5 * (a.a11 + a.a22)
    d = 0.5 * (a.a11 - a.a22)
    return lam, HermitianMatrix2(d, -d, a.a12)


def _tr_prod(x: HermitianMatrix2, y: HermitianMatrix2) -> float:
    # tr(xy) for Hermitian x, y is real.
    return x.a11 * y.a11 + x.a22 * y.a22 + 2.0 * (x.a12 * y.a12.conjugate()).real


def compute_t0(a0: HermitianMatrix2, b: HermitianMatrix2) -> float:
    a0, b = HermitianMatrix2.coerce(a0), HermitianMatrix2.coerce(b)
    norm2 = _tr_prod(a0, a0)
    if norm2 <= DEGENERATE_TOL:
        raise DegenerateAError(f"tr(A0^2) = {norm2:g} is zero; t0 is undefined")
    return _tr_prod(a0, b) / norm2


def reduce(a, b) -> CanonicalDecomposition:
    """Canonical decomposition of the pencil ``tA + B``.

    Raises :class:`~traceexp.errors.NotHermitianError` when a general
    matrix or array is passed that is not Hermitian.
    """
    a, b = HermitianMatrix2.coerce(a), HermitianMatrix2.coerce(b)
    lam, a0 = traceless_split(a)
    mu, b_shift = traceless_split(b)
    c = math.exp(mu)

    if _tr_prod(a0, a0) <= DEGENERATE_TOL:
        # A0 = 0: f(t) = e^{t lam} tr e^B.  Rotate B0 onto beta*tau.
        spread, _, v = eigen2(b_shift)
        return CanonicalDecomposition(
            lam=lam, mu=mu, t0=0.0, c=c, alpha=0.0, beta=max(spread, 0.0),
            U=_HADAMARD @ v, degenerate=True,
        )

    t0 = compute_t0(a0, b)
    b0 = b_shift - a0 * t0
    alpha, _, v = eigen2(a0)
    off = (v @ b0 @ adjoint(v)).m12
    phase = cmath.exp(-1j * cmath.phase(off)) if off != 0 else 1 + 0j
    u = Matrix2(phase, 0, 0, 1) @ v
    return CanonicalDecomposition(
        lam=lam, mu=mu, t0=t0, c=c, alpha=alpha, beta=abs(off), U=u, degenerate=False,
    )


def f_direct(a, b, t: float) -> float:
    """``tr exp(tA + B)`` straight from the matrix exponential."""
    a, b = HermitianMatrix2.coerce(a), HermitianMatrix2.coerce(b)
    return trace(herm_exp(a * float(t) + b)).real


def f_canonical(dec: CanonicalDecomposition, t: float) -> float:
    s = t + dec.t0
    return dec.c * math.exp(t * dec.lam) * 2.0 * math.cosh(math.hypot(dec.alpha * s, dec.beta))
