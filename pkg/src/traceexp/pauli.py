"""Closed-form 2x2 complex linear algebra.

Small immutable value types (:class:`Matrix2`, :class:`HermitianMatrix2`),
the Pauli constants ``sigma = diag(1, -1)`` and ``tau = antidiag(1, 1)``, an
exact-form Hermitian matrix exponential and a deterministic 2x2 Hermitian
eigendecomposition.  Nothing here iterates; every result is a closed form.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import DomainError, NotHermitianError

__all__ = [
    "Matrix2",
    "HermitianMatrix2",
    "identity",
    "zero",
    "pauli_sigma",
    "pauli_tau",
    "mat_mul",
    "mat_add",
    "mat_scale",
    "adjoint",
    "trace",
    "sinhc",
    "herm_exp",
    "eigen2",
    "SINHC_SERIES_THRESHOLD",
]

SINHC_SERIES_THRESHOLD = 1e-4


def _check_real(x, name="value") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def _check_complex(z, name="value") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{name} must be finite, got {z!r}")
    return z


@dataclass(frozen=True)
class Matrix2:
    """A general 2x2 complex matrix ``[[m11, m12], [m21, m22]]``."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    def __post_init__(self):
        for name in ("m11", "m12", "m21", "m22"):
            object.__setattr__(self, name, _check_complex(getattr(self, name), name))

    @classmethod
    def from_rows(cls, rows) -> "Matrix2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @classmethod
    def from_numpy(cls, arr) -> "Matrix2":
        arr = np.asarray(arr)
        if arr.shape != (2, 2):
            raise DomainError(f"expected a 2x2 array, got shape {arr.shape}")
        return cls(arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1])

    def to_numpy(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    def rows(self):
        return ((self.m11, self.m12), (self.m21, self.m22))

    def entries(self):
        return (self.m11, self.m12, self.m21, self.m22)

    def __matmul__(self, other: "Matrix2") -> "Matrix2":
        return mat_mul(self, other)

    def __add__(self, other: "Matrix2") -> "Matrix2":
        return mat_add(self, other)

    def __sub__(self, other: "Matrix2") -> "Matrix2":
        return mat_add(self, mat_scale(-1, other))

    def __neg__(self) -> "Matrix2":
        return mat_scale(-1, self)

    def __mul__(self, c) -> "Matrix2":
        if not isinstance(c, Number):
            return NotImplemented
        return mat_scale(c, self)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max(abs(z) for z in self.entries())

    def is_hermitian(self, tol: float = 0.0) -> bool:
        scale = max(1.0, self.max_abs())
        return (
            abs(self.m11.imag) <= tol * scale
            and abs(self.m22.imag) <= tol * scale
            and abs(self.m12 - self.m21.conjugate()) <= tol * scale
        )

    def to_hermitian(self, tol: float = 1e-12) -> "HermitianMatrix2":
        """Return the Hermitian view, raising if ``M != M*`` beyond ``tol``."""
        if not self.is_hermitian(tol):
            raise NotHermitianError(f"matrix is not Hermitian within {tol}: {self.rows()}")
        return HermitianMatrix2(self.m11.real, self.m22.real, self.m12)


@dataclass(frozen=True)
class HermitianMatrix2:
    """Hermitian 2x2 matrix stored as ``a11, a22`` (real) and ``a12``.

    ``a21`` is implied to be ``conj(a12)``, so the embedding is Hermitian
    by construction.
    """

    a11: float
    a22: float
    a12: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "a11", _check_real(self.a11, "a11"))
        object.__setattr__(self, "a22", _check_real(self.a22, "a22"))
        object.__setattr__(self, "a12", _check_complex(self.a12, "a12"))

    @classmethod
    def coerce(cls, m) -> "HermitianMatrix2":
        """Accept a HermitianMatrix2, a Matrix2 or a 2x2 array-like."""
        if isinstance(m, HermitianMatrix2):
            return m
        if isinstance(m, Matrix2):
            return m.to_hermitian()
        return Matrix2.from_numpy(m).to_hermitian()

    @property
    def a21(self) -> complex:
        return self.a12.conjugate()

    def to_matrix(self) -> Matrix2:
        return Matrix2(self.a11, self.a12, self.a12.conjugate(), self.a22)

    def to_numpy(self) -> np.ndarray:
        return self.to_matrix().to_numpy()

    def trace(self) -> float:
        return self.a11 + self.a22

    def __add__(self, other: "HermitianMatrix2") -> "HermitianMatrix2":
        if not isinstance(other, HermitianMatrix2):
            return NotImplemented
        return HermitianMatrix2(self.a11 + other.a11, self.a22 + other.a22, self.a12 + other.a12)

    def __sub__(self, other: "HermitianMatrix2") -> "HermitianMatrix2":
        if not isinstance(other, HermitianMatrix2):
            return NotImplemented
        return HermitianMatrix2(self.a11 - other.a11, self.a22 - other.a22, self.a12 - other.a12)

    def __mul__(self, c) -> "HermitianMatrix2":
        # Only real scalars keep the result Hermitian.
        if isinstance(c, complex) or not isinstance(c, Number):
            return NotImplemented
        c = float(c)
        return HermitianMatrix2(c * self.a11, c * self.a22, c * self.a12)

    __rmul__ = __mul__

    def __neg__(self) -> "HermitianMatrix2":
        return self * -1.0

    def __matmul__(self, other) -> Matrix2:
        return mat_mul(self.to_matrix(), _as_matrix(other))


def _as_matrix(m) -> Matrix2:
    return m.to_matrix() if isinstance(m, HermitianMatrix2) else m


def identity() -> Matrix2:
    return Matrix2(1, 0, 0, 1)


def zero() -> Matrix2:
    return Matrix2(0, 0, 0, 0)


def pauli_sigma() -> HermitianMatrix2:
    return HermitianMatrix2(1.0, -1.0, 0j)


def pauli_tau() -> HermitianMatrix2:
    return HermitianMatrix2(0.0, 0.0, 1 + 0j)


def mat_mul(a: Matrix2, b: Matrix2) -> Matrix2:
    a, b = _as_matrix(a), _as_matrix(b)
    return Matrix2(
        a.m11 * b.m11 + a.m12 * b.m21,
        a.m11 * b.m12 + a.m12 * b.m22,
        a.m21 * b.m11 + a.m22 * b.m21,
        a.m21 * b.m12 + a.m22 * b.m22,
    )


def mat_add(a: Matrix2, b: Matrix2) -> Matrix2:
    a, b = _as_matrix(a), _as_matrix(b)
    return Matrix2(a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22)


def mat_scale(c, a: Matrix2) -> Matrix2:
    a = _as_matrix(a)
    return Matrix2(c * a.m11, c * a.m12, c * a.m21, c * a.m22)


def adjoint(a: Matrix2) -> Matrix2:
    a = _as_matrix(a)
    return Matrix2(a.m11.conjugate(), a.m21.conjugate(), a.m12.conjugate(), a.m22.conjugate())


def trace(a: Matrix2) -> complex:
    a = _as_matrix(a)
    return a.m11 + a.m22


def sinhc(r: float) -> float:
    """``sinh(r) / r`` with the removable singularity at 0 filled in."""
    r = _check_real(r, "r")
    if r < 0:
        raise DomainError(f"sinhc expects r >= 0, got {r}")
    if r < SINHC_SERIES_THRESHOLD:
        r2 = r * r
        return 1.0 + r2 / 6.0 + r2 * r2 / 120.0
    return math.sinh(r) / r


def _traceless_parts(h: HermitianMatrix2):
    """Return ``(lam, d, r)`` with ``h = lam*I + [[d, a12], [conj(a12), -d]]``."""
    lam = 0.5 * (h.a11 + h.a22)
    d = 0.5 * (h.a11 - h.a22)
    r = math.hypot(d, abs(h.a12))
    return lam, d, r


def _split_weights(d: float, off: float, r: float):
    """``((1 + d/r)/2, (1 - d/r)/2)`` without cancellation."""
    # 1 - |d|/r == off**2 / (r * (r + |d|)), as bounded ratios.
    small = 0.5 * (off / r) * (off / (r + abs(d)))
    big = 1.0 - small
    return (big, small) if d >= 0 else (small, big)


def herm_exp(h: HermitianMatrix2) -> Matrix2:
    """Matrix exponential of a Hermitian 2x2 matrix.

    Uses ``h = lam*I + h0`` with ``h0`` traceless and ``h0**2 = r**2 I``, so
    ``exp(h) = exp(lam) * (cosh(r) I + sinhc(r) h0)``.  The diagonal is
    evaluated as a positive combination of ``exp(+r)`` and ``exp(-r)``,
    which is the same closed form without the ``cosh - sinh`` cancellation.
    """
    h = HermitianMatrix2.coerce(h)
    lam, d, r = _traceless_parts(h)
    scale = math.exp(lam)
    if r == 0.0:
        return Matrix2(scale, 0, 0, scale)
    p, q = _split_weights(d, abs(h.a12), r)
    ep, em = math.exp(r), math.exp(-r)
    s = scale * sinhc(r)
    return Matrix2(
        scale * (p * ep + q * em),
        s * h.a12,
        s * h.a12.conjugate(),
        scale * (q * ep + p * em),
    )


def _unit_phase(z: complex) -> complex:
    """Phase factor that rotates ``z`` onto the positive real axis."""
    if z == 0:
        return 1 + 0j
    return cmath.exp(-1j * cmath.phase(z))


def _normalized(v0: complex, v1: complex):
    # rescale first so subnormal components do not lose the norm
    big = max(abs(v0), abs(v1))
    v0, v1 = v0 / big, v1 / big
    norm = math.hypot(abs(v0), abs(v1))
    v0, v1 = v0 / norm, v1 / norm
    ph = _unit_phase(v0 if v0 != 0 else v1)
    return v0 * ph, v1 * ph


def eigen2(h: HermitianMatrix2):
    """Eigendecomposition ``U h U* = diag(l1, l2)`` with ``l1 >= l2``.

    The rows of ``U`` are the conjugated, normalised eigenvectors.  The
    ``l1`` eigenvector is built as ``(a12, l1 - a11)`` and each eigenvector
    has its first nonzero component rotated to be real and positive.  With
    ``a12 == 0`` the result is ``I`` or the swap permutation.
    """
    h = HermitianMatrix2.coerce(h)
    lam, d, r = _traceless_parts(h)
    l1, l2 = lam + r, lam - r
    if h.a12 == 0:
        if h.a11 >= h.a22:
            return h.a11, h.a22, identity()
        return h.a22, h.a11, Matrix2(0, 1, 1, 0)
    # l1 - a11 == r - d; use the rationalised form when d > 0.
    off2 = abs(h.a12) ** 2
    gap = off2 / (r + d) if d > 0 else r - d
    v0, v1 = _normalized(h.a12, complex(gap))
    w0, w1 = _normalized(-v1.conjugate(), v0.conjugate())
    u = Matrix2(v0.conjugate(), v1.conjugate(), w0.conjugate(), w1.conjugate())
    return l1, l2, u
