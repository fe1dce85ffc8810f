"""Floating-point closed forms built on the Cardano roots of ``x^3 - r x^2 - s x - t``.

Only the regime with a positive discriminant is supported: one real root
``alpha`` and a conjugate pair ``omega1``, ``omega2``.  Cube roots are the real
cube roots of the (real) radicands, which makes ``alpha`` real by construction;
``omega1 = r/3 + eps*A + eps^2*B`` carries the positive imaginary part.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import BinetPrecisionError, NonPositiveDiscriminantError
from .matrix import Mat3, mH_closed, mh_closed
from .sequence import SequenceSpec, discriminant, horadam_term, make_spec

EPS = complex(-0.5, math.sqrt(3) / 2)

TOL_ROOT = 1e-10
TOL_IMAG = 1e-8
TOL_BINET = 1e-6


@dataclass(frozen=True)
class CubicRoots:
    r: int
    s: int
    t: int
    delta: Fraction
    big_a: float
    big_b: float
    alpha: float
    omega1: complex
    omega2: complex
    eps: complex = EPS

    @property
    def roots(self):
        return (self.alpha, self.omega1, self.omega2)

    def nu(self, x):
        return x**3 - self.r * x**2 - self.s * x - self.t

    def scale(self) -> float:
        return float(max(1, abs(self.r), abs(self.s), abs(self.t)))

    def residuals(self):
        """``|nu(root)|`` for each root, divided by the coefficient scale."""
        return tuple(abs(self.nu(x)) / self.scale() for x in self.roots)

    def vieta_residuals(self):
        al, w1, w2 = self.roots
        return (
            abs(al + w1 + w2 - self.r),
            abs(al * w1 + al * w2 + w1 * w2 + self.s),
            abs(al * w1 * w2 - self.t),
        )

    def swapped(self) -> "CubicRoots":
        """Same roots with the labels of the complex pair exchanged."""
        return replace(self, omega1=self.omega2, omega2=self.omega1)


def _cbrt(x: float) -> float:
    return float(np.cbrt(x))


@lru_cache(maxsize=None)
def cubic_roots(r: int, s: int, t: int) -> CubicRoots:
    delta = discriminant(r, s, t)
    if delta <= 0:
        raise NonPositiveDiscriminantError(
            f"discriminant {delta} <= 0 for (r,s,t)=({r},{s},{t}); closed forms need one real and two complex roots")
    q = Fraction(r) ** 3 / 27 + Fraction(r * s, 6) + Fraction(t, 2)
    root_delta = math.sqrt(delta)
    big_a = _cbrt(float(q) + root_delta)
    big_b = _cbrt(float(q) - root_delta)
    shift = r / 3
    return CubicRoots(
        r=r, s=s, t=t, delta=delta, big_a=big_a, big_b=big_b,
        alpha=shift + big_a + big_b,
        omega1=shift + EPS * big_a + EPS**2 * big_b,
        omega2=shift + EPS**2 * big_a + EPS * big_b,
    )


def roots_for(spec: SequenceSpec, swap: bool = False) -> CubicRoots:
    roots = cubic_roots(spec.r, spec.s, spec.t)
    return roots.swapped() if swap else roots


@dataclass(frozen=True)
class BinetCoefficients:
    P: complex
    Q: complex
    R: complex


def binet_coefficients(spec: SequenceSpec, roots: Optional[CubicRoots] = None) -> BinetCoefficients:
    al, w1, w2 = (roots or roots_for(spec)).roots
    a, b, c = (float(v) for v in spec.initial)
    return BinetCoefficients(
        P=c - (w1 + w2) * b + w1 * w2 * a,
        Q=c - (al + w2) * b + al * w2 * a,
        R=c - (al + w1) * b + al * w1 * a,
    )


def _check_imag(value, magnitude: float, what: str):
    if abs(value.imag) > TOL_IMAG * max(1.0, magnitude):
        raise BinetPrecisionError(
            f"{what}: imaginary residual {abs(value.imag):.3g} exceeds {TOL_IMAG:g} x {max(1.0, magnitude):.3g}")


def binet_term(spec: SequenceSpec, n: int, roots: Optional[CubicRoots] = None) -> float:
    """``H[n]`` from the three-root closed form, evaluated in complex arithmetic.

    The imaginary part of the assembled sum must stay below ``TOL_IMAG`` times
    the largest summand magnitude, otherwise :class:`BinetPrecisionError`.
    """
    if n < 0:
        raise ValueError("closed form is evaluated for n >= 0 only")
    roots = roots or roots_for(spec)
    al, w1, w2 = roots.roots
    k = binet_coefficients(spec, roots)
    parts = (
        k.P * al**n / ((al - w1) * (al - w2)),
        -k.Q * w1**n / ((al - w1) * (w1 - w2)),
        k.R * w2**n / ((al - w2) * (w1 - w2)),
    )
    total = sum(parts)
    _check_imag(total, max(abs(p) for p in parts), f"binet_term(n={n})")
    return total.real


def matrix_binet_coefficients(m0, m1, m2, roots: CubicRoots):
    """Complex matrix coefficients ``(A, B, C)`` with ``M(n) = A al^n - B w1^n + C w2^n``.

    ``m0, m1, m2`` are the first three matrices of the sequence as arrays.
    """
    al, w1, w2 = roots.roots
    A = (m2 - (w1 + w2) * m1 + w1 * w2 * m0) / ((al - w1) * (al - w2))
    B = (m2 - (al + w2) * m1 + al * w2 * m0) / ((al - w1) * (w1 - w2))
    C = (m2 - (al + w1) * m1 + al * w1 * m0) / ((al - w2) * (w1 - w2))
    return A, B, C


@lru_cache(maxsize=4096)
def _matrix_coefficients(spec: SequenceSpec, which: str, roots: CubicRoots):
    closed = mH_closed if which == "H" else mh_closed
    m0, m1, m2 = (closed(spec, k).to_float().astype(complex) for k in range(3))
    return matrix_binet_coefficients(m0, m1, m2, roots)


def _matrix_binet(spec: SequenceSpec, which: str, n: int, roots: CubicRoots) -> np.ndarray:
    if n < 0:
        raise ValueError("closed form is evaluated for n >= 0 only")
    A, B, C = _matrix_coefficients(spec, which, roots)
    al, w1, w2 = roots.roots
    parts = (A * al**n, -B * w1**n, C * w2**n)
    total = parts[0] + parts[1] + parts[2]
    magnitude = max(float(np.max(np.abs(p))) for p in parts)
    worst = total.flat[int(np.argmax(np.abs(total.imag)))]
    _check_imag(worst, magnitude, f"matrix closed form (n={n})")
    return total.real


def binet_matrix_h(spec: SequenceSpec, n: int, roots: Optional[CubicRoots] = None) -> np.ndarray:
    """Float approximation of ``M_h(n)`` from its three-root closed form."""
    return _matrix_binet(spec, "h", n, roots or roots_for(spec))


def binet_matrix_H(spec: SequenceSpec, n: int, roots: Optional[CubicRoots] = None) -> np.ndarray:
    """Float approximation of ``M_H(n)``; the initial matrix comes from the backward recurrence."""
    return _matrix_binet(spec, "H", n, roots or roots_for(spec))


def relative_error(approx, exact, entrywise: bool = False) -> float:
    """Relative error of ``approx`` against ``exact``, floored at an absolute scale of 1.

    For matrices the default is normwise, ``max|approx - exact| / max(1, max|exact|)``.
    ``entrywise=True`` scales every entry by its own ``max(1, |exact|)``, which
    also exposes cancellation in entries much smaller than the rest of the matrix.
    """
    approx, exact = (x.to_float() if isinstance(x, Mat3) else np.asarray(x, dtype=float)
                     for x in (approx, exact))
    diff = np.abs(approx - exact)
    if entrywise:
        return float(np.max(diff / np.maximum(1.0, np.abs(exact))))
    return float(np.max(diff) / max(1.0, float(np.max(np.abs(exact)))))


def power_sum(r: int, s: int, t: int, m: int) -> Fraction:
    """Exact ``alpha^m + omega1^m + omega2^m`` via Newton's identities.

    The power sums obey the recurrence itself with starting values
    ``(3, r, r^2 + 2s)``; negative ``m`` runs it backwards.
    """
    return horadam_term(make_spec(r, s, t, 3, r, r * r + 2 * s), m)


def mu(roots: CubicRoots, m: int) -> complex:
    al, w1, w2 = roots.roots
    return al**m + w1**m + w2**m
