"""Machine checks for the scalar and matrix identities of third-order Horadam sequences.

Every check returns :class:`IdentityVerdict` records.  Identities that follow
from the recurrence alone are compared in exact rational arithmetic, so a
pass means the residual is exactly zero.  The arithmetic-subsequence sums
depend on the real root individually and are compared in floating point.

When a published closed form disagrees with the exact values but a repaired
form closes, the verdict is ``FLAGGED`` and carries a discrepancy record with
the exact data; it is never silently adjusted into a pass.
"""
from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .binet import TOL_IMAG, CubicRoots, mu, roots_for
from .errors import (IndexOutOfRangeError, NonPositiveDiscriminantError, RootOfNuError,
                     SigmaNearZeroError, ZeroXError)
from .matrix import Mat3, mH0_printed
from .sequence import SequenceSpec, TermTable

SUITE_VERSION = "1.0"
TOL_SUBSEQ = 1e-6
SIGMA_FLOOR = 1e-9


class IdentityId(str, enum.Enum):
    CONVOLUTION = "convolution"
    TRIBONACCI_SQUARE = "tribonacci_square"
    HORADAM_SQUARE = "horadam_square"
    GEOMETRIC_SUM_H = "geometric_sum_H"
    GEOMETRIC_SUM_h = "geometric_sum_h"
    SUBSEQUENCE_SUM_H = "subsequence_sum_H"
    SUBSEQUENCE_SUM_h = "subsequence_sum_h"
    SEMIGROUP_h = "semigroup_h"
    COMMUTE_H = "commute_H"
    SHIFT_BY_H1 = "shift_by_H1"
    SHIFT_BY_h1 = "shift_by_h1"
    ODD_INDEX_PRODUCT = "odd_index_product"
    DECOMPOSITION = "decomposition"
    DECOMPOSITION_SHIFTED = "decomposition_shifted"
    MIXED_SHIFT = "mixed_shift"
    POWER_LAW = "power_law"
    POWER_SQUARE = "power_square"
    POWER_CUBE = "power_cube"
    SQUARE_SCALAR = "square_scalar"
    INITIAL_MATRIX = "initial_matrix"


class Mode(str, enum.Enum):
    EXACT = "exact"
    NUMERIC = "numeric"


class Status(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"
    FLAGGED = "flagged"


Residual = Union[Fraction, float, None]


@dataclass
class IdentityVerdict:
    identity_id: IdentityId
    spec: SequenceSpec
    params: Tuple[Tuple[str, object], ...]
    mode: Mode
    status: Status
    residual: Residual
    exploratory: bool = False
    note: str = ""
    detail: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def sort_key(self):
        return (self.identity_id.value, self.spec.as_tuple(),
                tuple((k, _sortable(v)) for k, v in self.params), self.exploratory)

    def to_dict(self) -> dict:
        d = {
            "identity_id": self.identity_id.value,
            "spec": spec_to_dict(self.spec),
            "params": {k: _jsonable(v) for k, v in self.params},
            "mode": self.mode.value,
            "status": self.status.value,
            "pass": self.passed,
            "residual": _jsonable(self.residual),
        }
        if self.exploratory:
            d["exploratory"] = True
        if self.note:
            d["note"] = self.note
        if self.detail:
            d["detail"] = {k: _jsonable(v) for k, v in self.detail.items()}
        return d


def _sortable(v):
    return (0, v, "") if isinstance(v, (int, Fraction)) else (1, 0, str(v))


def _jsonable(v):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return float(repr(v)) if np.isfinite(v) else str(v)
    if isinstance(v, complex):
        return [_jsonable(v.real), _jsonable(v.imag)]
    if isinstance(v, Mat3):
        return [[str(x) for x in row] for row in v.rows]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, enum.Enum):
        return v.value
    return str(v)


def spec_to_dict(spec: SequenceSpec) -> dict:
    return {"r": spec.r, "s": spec.s, "t": spec.t,
            "a": str(spec.a), "b": str(spec.b), "c": str(spec.c)}


class SpecContext:
    """Per-spec memo of terms, closed-form matrices and roots shared by the checks."""

    def __init__(self, spec: SequenceSpec, swap_labels: bool = False):
        self.spec = spec
        self.H = TermTable(spec)
        self.h = TermTable(spec.tribonacci())
        self.swap_labels = swap_labels
        self._mH: Dict[int, Mat3] = {}
        self._mh: Dict[int, Mat3] = {}
        self._roots: Optional[CubicRoots] = None

    def _closed(self, X, n: int) -> Mat3:
        s, t = self.spec.s, self.spec.t
        return Mat3((
            (X[n + 1], s * X[n] + t * X[n - 1], t * X[n]),
            (X[n], s * X[n - 1] + t * X[n - 2], t * X[n - 1]),
            (X[n - 1], s * X[n - 2] + t * X[n - 3], t * X[n - 2]),
        ))

    def mH(self, n: int) -> Mat3:
        m = self._mH.get(n)
        if m is None:
            m = self._mH[n] = self._closed(self.H, n)
        return m

    def mh(self, n: int) -> Mat3:
        m = self._mh.get(n)
        if m is None:
            m = self._mh[n] = self._closed(self.h, n)
        return m

    def matrices(self, which: str):
        if which == "H":
            return self.mH
        if which == "h":
            return self.mh
        raise ValueError(f"which must be 'H' or 'h', got {which!r}")

    @property
    def roots(self) -> CubicRoots:
        if self._roots is None:
            self._roots = roots_for(self.spec, swap=self.swap_labels)
        return self._roots


def _ctx(spec: SequenceSpec, ctx: Optional[SpecContext]) -> SpecContext:
    if ctx is None:
        return SpecContext(spec)
    if ctx.spec != spec:
        raise ValueError("context belongs to a different spec")
    return ctx


def _diff(x, y) -> Fraction:
    if isinstance(x, Mat3):
        return (x - y).max_abs()
    return abs(Fraction(x) - Fraction(y))


def _chain(*sides) -> Fraction:
    """Largest exact discrepancy along an equality chain ``sides[0] = sides[1] = ...``."""
    return max(_diff(sides[0], other) for other in sides[1:])


def _exact(identity, spec, params, residual, exploratory=False, note="") -> IdentityVerdict:
    residual = Fraction(residual)
    status = Status.PASS if residual == 0 else Status.FAIL
    return IdentityVerdict(identity, spec, tuple(params), Mode.EXACT, status, residual,
                           exploratory=exploratory, note=note)


def _range_guard(ok: bool, message: str, exploratory: bool):
    if not ok and not exploratory:
        raise IndexOutOfRangeError(message)
    return not ok


# -- scalar identities ---------------------------------------------------------------

def check_convolution(spec: SequenceSpec, n: int, m: int, exploratory: bool = False,
                      ctx: Optional[SpecContext] = None) -> IdentityVerdict:
    """``H[n+m] = h[n] H[m+1] + (s h[n-1] + t h[n-2]) H[m] + t h[n-1] H[m-1]`` for n >= 2, m >= 1."""
    outside = _range_guard(n >= 2 and m >= 1, f"convolution needs n >= 2 and m >= 1, got n={n}, m={m}", exploratory)
    c = _ctx(spec, ctx)
    H, h, s, t = c.H, c.h, spec.s, spec.t
    lhs = H[n + m]
    rhs = h[n] * H[m + 1] + (s * h[n - 1] + t * h[n - 2]) * H[m] + t * h[n - 1] * H[m - 1]
    return _exact(IdentityId.CONVOLUTION, spec, (("n", n), ("m", m)), abs(lhs - rhs), outside)


def check_h_square(spec: SequenceSpec, n: int, exploratory: bool = False,
                   ctx: Optional[SpecContext] = None) -> IdentityVerdict:
    """``h[n]^2 + s h[n-1]^2 + 2t h[n-1] h[n-2] = h[2n-1]`` for n >= 2."""
    outside = _range_guard(n >= 2, f"tribonacci square needs n >= 2, got {n}", exploratory)
    c = _ctx(spec, ctx)
    h, s, t = c.h, spec.s, spec.t
    lhs = h[n] ** 2 + s * h[n - 1] ** 2 + 2 * t * h[n - 1] * h[n - 2]
    return _exact(IdentityId.TRIBONACCI_SQUARE, spec, (("n", n),), abs(lhs - h[2 * n - 1]), outside)


def check_H_square(spec: SequenceSpec, n: int, exploratory: bool = False,
                   ctx: Optional[SpecContext] = None) -> IdentityVerdict:
    """``H[n]^2 + s H[n-1]^2 + 2t H[n-1] H[n-2] = c H[2n-2] + (sb + ta) H[2n-3] + tb H[2n-4]``."""
    outside = _range_guard(n >= 2, f"horadam square needs n >= 2, got {n}", exploratory)
    c_ = _ctx(spec, ctx)
    H = c_.H
    r, s, t, a, b, c = spec.as_tuple()
    lhs = H[n] ** 2 + s * H[n - 1] ** 2 + 2 * t * H[n - 1] * H[n - 2]
    rhs = c * H[2 * n - 2] + (s * b + t * a) * H[2 * n - 3] + t * b * H[2 * n - 4]
    return _exact(IdentityId.HORADAM_SQUARE, spec, (("n", n),), abs(lhs - rhs), outside)


def check_square_scalar(spec: SequenceSpec, n: int, exploratory: bool = False,
                        ctx: Optional[SpecContext] = None) -> IdentityVerdict:
    """Both closed forms of ``H[n+2]^2 + s H[n+1]^2 + 2t H[n] H[n+1]`` for n >= 0.

    One form is a combination of ``h[2n+1], h[2n], h[2n-1]``, the other of
    ``H[2n+2], H[2n+1], H[2n]``; the residual is the larger of the two.
    """
    outside = _range_guard(n >= 0, f"square identity needs n >= 0, got {n}", exploratory)
    c_ = _ctx(spec, ctx)
    H, h = c_.H, c_.h
    r, s, t, a, b, c = spec.as_tuple()
    lhs = H[n + 2] ** 2 + s * H[n + 1] ** 2 + 2 * t * H[n] * H[n + 1]
    via_h = ((c * c + s * b * b + 2 * t * a * b) * h[2 * n + 1]
             + (b * b * (t - r * s) + 2 * t * a * c + 2 * s * b * c - 2 * r * t * a * b) * h[2 * n]
             + t * (t * a * a - r * b * b + 2 * b * c) * h[2 * n - 1])
    via_H = c * H[2 * n + 2] + (s * b + t * a) * H[2 * n + 1] + t * b * H[2 * n]
    return _exact(IdentityId.SQUARE_SCALAR, spec, (("n", n),), _chain(lhs, via_h, via_H), outside)


# -- geometric sums --------------------------------------------------------------------

def nu(spec: SequenceSpec, x) -> Fraction:
    x = Fraction(x)
    return x**3 - spec.r * x**2 - spec.s * x - spec.t


def _geometric_guard(spec: SequenceSpec, x: Fraction) -> Fraction:
    if x == 0:
        raise ZeroXError("geometric weight x must be nonzero")
    v = nu(spec, x)
    if v == 0:
        raise RootOfNuError(f"x = {x} is a root of the characteristic polynomial")
    return v


def _geometric_head(M: Callable[[int], Mat3], spec: SequenceSpec, x: Fraction) -> Mat3:
    r, s = spec.r, spec.s
    return M(2) - r * M(1) - s * M(0) + (M(1) - r * M(0)) * x + M(0) * (x * x)


def _geometric_rhs(M, spec, x: Fraction, n: int, head: Mat3, x_pow_n: Fraction, nu_x: Fraction) -> Mat3:
    r, t = spec.r, spec.t
    body = head * (x_pow_n * x) - t * M(n) - (M(n + 2) - r * M(n + 1)) * x - M(n + 1) * (x * x)
    return body / (x_pow_n * nu_x)


def geometric_sum_closed(M: Callable[[int], Mat3], spec: SequenceSpec, x: Fraction, n: int,
                         nu_x: Optional[Fraction] = None) -> Mat3:
    """Closed form of ``sum_{k=0}^{n} M(k) / x^k`` for a matrix sequence obeying the recurrence."""
    x = Fraction(x)
    if nu_x is None:
        nu_x = nu(spec, x)
    return _geometric_rhs(M, spec, x, n, _geometric_head(M, spec, x), x**n, nu_x)


def check_sum_geometric(spec: SequenceSpec, x, n: int, which: str = "H",
                        ctx: Optional[SpecContext] = None) -> IdentityVerdict:
    """Exact check of the weighted sum ``sum_{k=0}^{n} M(k) / x^k`` against its closed form."""
    x = Fraction(x)
    nu_x = _geometric_guard(spec, x)
    if n < 0:
        raise IndexOutOfRangeError(f"geometric sum needs n >= 0, got {n}")
    c = _ctx(spec, ctx)
    M = c.matrices(which)
    lhs = Mat3.zero()
    for k in range(n + 1):
        lhs = lhs + M(k) / x**k
    rhs = geometric_sum_closed(M, spec, x, n, nu_x)
    ident = IdentityId.GEOMETRIC_SUM_H if which == "H" else IdentityId.GEOMETRIC_SUM_h
    return _exact(ident, spec, (("which", which), ("x", x), ("n", n)), _diff(lhs, rhs))


def sweep_sum_geometric(spec: SequenceSpec, x, n_max: int, which: str,
                        ctx: Optional[SpecContext] = None) -> List[IdentityVerdict]:
    """:func:`check_sum_geometric` for every ``n`` in ``[0, n_max]`` with a running left side."""
    x = Fraction(x)
    nu_x = _geometric_guard(spec, x)
    c = _ctx(spec, ctx)
    M = c.matrices(which)
    ident = IdentityId.GEOMETRIC_SUM_H if which == "H" else IdentityId.GEOMETRIC_SUM_h
    out = []
    head = _geometric_head(M, spec, x)
    lhs = Mat3.zero()
    x_pow = Fraction(1)
    for n in range(n_max + 1):
        lhs = lhs + M(n) / x_pow
        rhs = _geometric_rhs(M, spec, x, n, head, x_pow, nu_x)
        out.append(_exact(ident, spec, (("which", which), ("x", x), ("n", n)), _diff(lhs, rhs)))
        x_pow *= x
    return out


# -- arithmetic-subsequence sums ---------------------------------------------------------

@dataclass(frozen=True)
class SubseqSumFactors:
    """Root-dependent scalars of the subsequence-sum closed form.

    ``sigma_m`` is the denominator as published,
    ``t^m (1 + alpha^-m) + (1 - alpha^m)(omega1^m + omega2^m - 1)``.
    ``sigma_m_repaired`` flips the sign of the ``alpha^-m`` term, giving
    ``(alpha^m - 1)(omega1^m - 1)(omega2^m - 1)``, the denominator that the
    geometric-series derivation actually produces.
    """

    m: int
    sigma_m: float
    mu_m: float
    sigma_m_repaired: float
    mu_imag: float


def subseq_factors(roots: CubicRoots, m: int) -> SubseqSumFactors:
    al, w1, w2 = roots.roots
    tm = roots.t ** m
    tail = (1 - al**m) * (w1**m + w2**m - 1)
    sigma = tm * (1 + al ** (-m)) + tail
    repaired = tm * (1 - al ** (-m)) + tail
    mu_m = mu(roots, m)
    return SubseqSumFactors(m=m, sigma_m=complex(sigma).real, mu_m=mu_m.real,
                            sigma_m_repaired=complex(repaired).real, mu_imag=abs(mu_m.imag))


def _subseq_closed_parts(M: Callable[[int], Mat3], t: int, m: int, l: int, n: int):
    tm = t**m
    fixed = (M(m * (n + 1) + l) - M(l) + tm * (M(m * n + l) - M(l - m))
             + M(m * (n + 2) + l) - M(l + m))
    mu_part = M(m * (n + 1) + l) - M(l)
    return fixed, mu_part


def subseq_residual(lhs: Sequence[float], fixed: Sequence[float], mu_part: Sequence[float],
                    mu_m: float, sigma: float) -> float:
    """Entrywise error of the closed form, scaled by ``max(1, max|lhs|)``.

    Arguments are row-major float entries (see :meth:`Mat3.to_floats`).
    """
    err = max(abs(x - (f - mu_m * p) / sigma) for x, f, p in zip(lhs, fixed, mu_part))
    return err / max(1.0, max(abs(x) for x in lhs))


def _subseq_factors_checked(roots: CubicRoots, m: int) -> SubseqSumFactors:
    f = subseq_factors(roots, m)
    if abs(f.sigma_m) <= SIGMA_FLOOR or abs(f.sigma_m_repaired) <= SIGMA_FLOOR:
        raise SigmaNearZeroError(
            f"|sigma_{m}| too small (published {f.sigma_m:.3g}, repaired {f.sigma_m_repaired:.3g})")
    return f


def _subseq_verdict(spec, M, f: SubseqSumFactors, m, l, n, which, lhs: Mat3, outside) -> IdentityVerdict:
    fixed, mu_part = _subseq_closed_parts(M, spec.t, m, l, n)
    lhs_f, fixed_f, mu_f = lhs.to_floats(), fixed.to_floats(), mu_part.to_floats()
    published = subseq_residual(lhs_f, fixed_f, mu_f, f.mu_m, f.sigma_m)
    ident = IdentityId.SUBSEQUENCE_SUM_H if which == "H" else IdentityId.SUBSEQUENCE_SUM_h
    params = (("which", which), ("m", m), ("l", l), ("n", n))
    detail = {"sigma_m": f.sigma_m, "mu_m": f.mu_m}
    if f.mu_imag > TOL_IMAG * max(1.0, abs(f.mu_m)):
        detail["mu_imag"] = f.mu_imag
    if published <= TOL_SUBSEQ:
        return IdentityVerdict(ident, spec, params, Mode.NUMERIC, Status.PASS, published,
                               exploratory=outside, detail=detail)
    repaired = subseq_residual(lhs_f, fixed_f, mu_f, f.mu_m, f.sigma_m_repaired)
    detail.update({"sigma_m_repaired": f.sigma_m_repaired, "residual_repaired": repaired,
                   "exact_lhs": lhs})
    if repaired <= TOL_SUBSEQ:
        return IdentityVerdict(
            ident, spec, params, Mode.NUMERIC, Status.FLAGGED, published, exploratory=outside,
            note="published sigma_m fails; sign-repaired sigma_m = t^m(1 - alpha^-m) + "
                 "(1 - alpha^m)(omega1^m + omega2^m - 1) closes",
            detail=detail)
    return IdentityVerdict(ident, spec, params, Mode.NUMERIC, Status.FAIL, published,
                           exploratory=outside, detail=detail)


def _subseq_setup(spec, m, l, n, exploratory, ctx, roots):
    if m < 1 or n < 0:
        raise IndexOutOfRangeError(f"subsequence sum needs m >= 1 and n >= 0, got m={m}, n={n}")
    outside = _range_guard(l >= m, f"subsequence sum needs l >= m, got l={l}, m={m}", exploratory)
    c = _ctx(spec, ctx)
    if roots is None:
        if not spec.binet_available:
            raise NonPositiveDiscriminantError(f"discriminant {spec.delta} <= 0")
        roots = c.roots
    return c, outside, _subseq_factors_checked(roots, m)


def check_sum_subsequence(spec: SequenceSpec, m: int, l: int, n: int, which: str = "H",
                          exploratory: bool = False, ctx: Optional[SpecContext] = None,
                          roots: Optional[CubicRoots] = None) -> IdentityVerdict:
    """Numeric check of ``sum_{k=0}^{n} M(mk + l)`` against the closed form with sigma_m, mu(m).

    The left side is summed exactly and converted to float.  If the published
    denominator fails but the repaired one closes within tolerance the verdict
    is ``FLAGGED`` and carries the exact left side for inspection.
    """
    c, outside, f = _subseq_setup(spec, m, l, n, exploratory, ctx, roots)
    M = c.matrices(which)
    lhs = Mat3.zero()
    for k in range(n + 1):
        lhs = lhs + M(m * k + l)
    return _subseq_verdict(spec, M, f, m, l, n, which, lhs, outside)


def sweep_sum_subsequence(spec: SequenceSpec, m: int, l: int, n_max: int, which: str = "H",
                          exploratory: bool = False, ctx: Optional[SpecContext] = None,
                          roots: Optional[CubicRoots] = None) -> List[IdentityVerdict]:
    """:func:`check_sum_subsequence` for every ``n`` in ``[0, n_max]`` with a running left side."""
    c, outside, f = _subseq_setup(spec, m, l, n_max, exploratory, ctx, roots)
    M = c.matrices(which)
    out = []
    lhs = Mat3.zero()
    for n in range(n_max + 1):
        lhs = lhs + M(m * n + l)
        out.append(_subseq_verdict(spec, M, f, m, l, n, which, lhs, outside))
    return out


# -- matrix products ---------------------------------------------------------------------

def check_products(spec: SequenceSpec, n: int, m: int,
                   ctx: Optional[SpecContext] = None) -> List[IdentityVerdict]:
    """Five exact product laws linking ``M_h`` and ``M_H`` (all integer n, m)."""
    c = _ctx(spec, ctx)
    mh, mH = c.mh, c.mH
    nm = (("n", n), ("m", m))
    return [
        _exact(IdentityId.SEMIGROUP_h, spec, nm,
               _chain(mh(n) @ mh(m), mh(m) @ mh(n), mh(n + m))),
        _exact(IdentityId.COMMUTE_H, spec, nm, _chain(mH(n) @ mH(m), mH(m) @ mH(n))),
        _exact(IdentityId.SHIFT_BY_H1, spec, (("n", n),),
               _chain(mH(1) @ mh(n), mH(n) @ mh(1), mH(n + 1))),
        _exact(IdentityId.SHIFT_BY_h1, spec, (("n", n),),
               _chain(mH(n) @ mh(1), mh(1) @ mH(n), mH(n + 1))),
        _exact(IdentityId.ODD_INDEX_PRODUCT, spec, (("n", n),),
               _chain(mh(n) @ mH(n + 1), mH(2 * n + 1))),
    ]


def check_decomposition(spec: SequenceSpec, n: int,
                        ctx: Optional[SpecContext] = None) -> List[IdentityVerdict]:
    """``M_H(n)`` as a combination of three consecutive ``M_h`` matrices, in both published forms."""
    c_ = _ctx(spec, ctx)
    mh, mH = c_.mh, c_.mH
    r, s, t, a, b, c = spec.as_tuple()
    first = b * mh(n) + (c - r * b) * mh(n - 1) + t * a * mh(n - 2)
    second = a * mh(n + 1) + (b - r * a) * mh(n) + (c - r * b - s * a) * mh(n - 1)
    return [
        _exact(IdentityId.DECOMPOSITION, spec, (("n", n),), _diff(mH(n), first)),
        _exact(IdentityId.DECOMPOSITION_SHIFTED, spec, (("n", n),), _diff(mH(n), second)),
    ]


def check_power_laws(spec: SequenceSpec, n: int, m: int,
                     ctx: Optional[SpecContext] = None) -> List[IdentityVerdict]:
    """Shift and power laws for ``M_H(n+1)``: the mixed shift, the m-th power law and its m = 2, 3 cases."""
    if n < 0 or m < 1:
        raise IndexOutOfRangeError(f"power laws need n >= 0 and m >= 1, got n={n}, m={m}")
    c = _ctx(spec, ctx)
    mh, mH = c.mh, c.mH
    H1, Hn1 = mH(1), mH(n + 1)
    nm = (("n", n), ("m", m))
    sq, cube = Hn1 @ Hn1, Hn1 @ Hn1 @ Hn1
    H1sq = H1 @ H1
    return [
        _exact(IdentityId.MIXED_SHIFT, spec, nm, _chain(mh(m) @ Hn1, Hn1 @ mh(m), mH(m + n + 1))),
        _exact(IdentityId.POWER_LAW, spec, nm, _chain(Hn1 ** m, (H1 ** m) @ mh(m * n))),
        _exact(IdentityId.POWER_SQUARE, spec, (("n", n),),
               _chain(sq, H1sq @ mh(2 * n), H1 @ mH(2 * n + 1))),
        _exact(IdentityId.POWER_CUBE, spec, (("n", n),),
               _chain(cube, H1sq @ H1 @ mh(3 * n), H1sq @ mH(3 * n + 1))),
    ]


def check_initial_matrix(spec: SequenceSpec, ctx: Optional[SpecContext] = None) -> IdentityVerdict:
    """Compare the published ``M_H(0)`` with the one forced by the backward recurrence.

    The backward-recurrence matrix is authoritative.  A mismatch is FLAGGED
    when that matrix continues the matrix recurrence and the disagreement is
    confined to the known misprinted entry; anything else is a FAIL.
    """
    c = _ctx(spec, ctx)
    r, s, t = spec.coefficients
    derived, printed = c.mH(0), mH0_printed(spec)
    residual = _diff(derived, printed)
    if residual == 0:
        return _exact(IdentityId.INITIAL_MATRIX, spec, (), residual)
    recurrence_ok = c.mH(3) == r * c.mH(2) + s * c.mH(1) + t * derived
    cells = [(i, j) for i in range(3) for j in range(3) if derived[i, j] != printed[i, j]]
    status = Status.FLAGGED if recurrence_ok and cells == [(2, 1)] else Status.FAIL
    return IdentityVerdict(
        IdentityId.INITIAL_MATRIX, spec, (), Mode.EXACT, status, residual,
        note="published row 3, column 2 entry is -r*H[-1]; the layout requires s*H[-2] + t*H[-3] = a - r*H[-1]",
        detail={"cells": [f"({i + 1},{j + 1})" for i, j in cells], "derived": derived,
                "published": printed})


# -- suite ---------------------------------------------------------------------------------

@dataclass
class SuitePlan:
    """Index ranges and sampling knobs for :func:`run_suite`."""

    n_max: int = 30
    seed: int = 0
    x_values: Sequence = (2, -1, Fraction(1, 2), 3)
    pair_samples: int = 8
    power_m_max: int = 6
    subseq_m_max: int = 4
    subseq_l_span: int = 4
    subseq_n_max: int = 10
    exploratory: bool = False
    swap_labels: bool = False

    def rng(self, spec: SequenceSpec) -> random.Random:
        # per-spec stream, so results do not depend on grid order
        return random.Random(f"{self.seed}:{spec.label()}")

    def pairs(self, spec: SequenceSpec, lo: int, hi: int, m_lo: int, m_hi: int):
        rng = self.rng(spec)
        fixed = {(lo, m_lo), (hi, m_hi), (lo, m_hi), (hi, m_lo), (max(lo, 0), max(m_lo, 0))}
        sampled = {(rng.randint(lo, hi), rng.randint(m_lo, m_hi)) for _ in range(self.pair_samples)}
        return sorted(fixed | sampled)


SuiteCheck = Callable[[SpecContext, SuitePlan], Iterable[IdentityVerdict]]
SUITE: List[SuiteCheck] = []


def suite_check(fn: SuiteCheck) -> SuiteCheck:
    SUITE.append(fn)
    return fn


@suite_check
def _suite_scalar(ctx: SpecContext, plan: SuitePlan):
    spec, N = ctx.spec, plan.n_max
    for n in range(2, N + 1):
        for m in range(1, N + 1):
            yield check_convolution(spec, n, m, ctx=ctx)
    for n in range(2, N + 1):
        yield check_h_square(spec, n, ctx=ctx)
        yield check_H_square(spec, n, ctx=ctx)
    for n in range(0, N + 1):
        yield check_square_scalar(spec, n, ctx=ctx)
    if plan.exploratory:
        for n in range(-3, 2):
            for m in range(-3, 1 if n >= 2 else 4):
                yield check_convolution(spec, n, m, exploratory=True, ctx=ctx)
            yield check_h_square(spec, n, exploratory=True, ctx=ctx)
            yield check_H_square(spec, n, exploratory=True, ctx=ctx)


@suite_check
def _suite_geometric(ctx: SpecContext, plan: SuitePlan):
    for x in plan.x_values:
        x = Fraction(x)
        if nu(ctx.spec, x) == 0:
            for ident in (IdentityId.GEOMETRIC_SUM_H, IdentityId.GEOMETRIC_SUM_h):
                yield IdentityVerdict(ident, ctx.spec, (("x", x),), Mode.EXACT, Status.SKIP, None,
                                      note="x is a root of the characteristic polynomial")
            continue
        for which in ("H", "h"):
            yield from sweep_sum_geometric(ctx.spec, x, plan.n_max, which, ctx=ctx)


@suite_check
def _suite_subsequence(ctx: SpecContext, plan: SuitePlan):
    spec = ctx.spec
    if not spec.binet_available:
        for ident in (IdentityId.SUBSEQUENCE_SUM_H, IdentityId.SUBSEQUENCE_SUM_h):
            yield IdentityVerdict(ident, spec, (), Mode.NUMERIC, Status.SKIP, None,
                                  note=f"discriminant {spec.delta} <= 0")
        return
    for m in range(1, plan.subseq_m_max + 1):
        for which in ("H", "h"):
            ident = IdentityId.SUBSEQUENCE_SUM_H if which == "H" else IdentityId.SUBSEQUENCE_SUM_h
            ls = list(range(m, m + plan.subseq_l_span + 1))
            if plan.exploratory:
                ls = list(range(0, m)) + ls
            try:
                for l in ls:
                    yield from sweep_sum_subsequence(spec, m, l, min(plan.n_max, plan.subseq_n_max),
                                                     which, exploratory=l < m, ctx=ctx)
            except SigmaNearZeroError as exc:
                yield IdentityVerdict(ident, spec, (("which", which), ("m", m)), Mode.NUMERIC,
                                      Status.SKIP, None, note=str(exc))


@suite_check
def _suite_matrix(ctx: SpecContext, plan: SuitePlan):
    spec, N = ctx.spec, plan.n_max
    for n, m in plan.pairs(spec, -N, N, -N, N):
        for v in check_products(spec, n, m, ctx=ctx):
            if v.identity_id in (IdentityId.SEMIGROUP_h, IdentityId.COMMUTE_H):
                yield v
    for n in range(-N, N + 1):
        for v in check_products(spec, n, 0, ctx=ctx):
            if v.identity_id not in (IdentityId.SEMIGROUP_h, IdentityId.COMMUTE_H):
                yield v
        yield from check_decomposition(spec, n, ctx=ctx)
    for n in range(0, N + 1):
        for v in check_power_laws(spec, n, 1, ctx=ctx):
            if v.identity_id in (IdentityId.POWER_SQUARE, IdentityId.POWER_CUBE):
                yield v
    for n, m in plan.pairs(spec, 0, N, 1, plan.power_m_max):
        for v in check_power_laws(spec, n, m, ctx=ctx):
            if v.identity_id in (IdentityId.MIXED_SHIFT, IdentityId.POWER_LAW):
                yield v
    yield check_initial_matrix(spec, ctx=ctx)


@dataclass
class IdentityReport:
    seed: int
    grid: List[SequenceSpec]
    verdicts: List[IdentityVerdict]
    summary: Dict[str, Dict[str, object]]
    suite_version: str = SUITE_VERSION

    @property
    def failures(self) -> List[IdentityVerdict]:
        return [v for v in self.verdicts if v.status is Status.FAIL and not v.exploratory]

    @property
    def flagged(self) -> List[IdentityVerdict]:
        return [v for v in self.verdicts if v.status is Status.FLAGGED]

    @property
    def ok(self) -> bool:
        """True iff no in-range verdict failed (skips and flagged discrepancies do not count)."""
        return all(s["fail"] == 0 for s in self.summary.values())

    def to_dict(self) -> dict:
        return {
            "suite_version": self.suite_version,
            "seed": self.seed,
            "grid": [spec_to_dict(s) for s in self.grid],
            "verdicts": [v.to_dict() for v in self.verdicts],
            "summary": {k: {kk: _jsonable(vv) for kk, vv in v.items()}
                        for k, v in sorted(self.summary.items())},
        }

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def _summarize(summary: Dict[str, Dict[str, object]], v: IdentityVerdict) -> None:
    s = summary.setdefault(v.identity_id.value, {
        "pass": 0, "fail": 0, "skip": 0, "flagged": 0, "exploratory": 0, "worst_residual": None})
    if v.exploratory:
        s["exploratory"] += 1
        return
    s[v.status.value] += 1
    if v.residual is not None and v.status is not Status.SKIP:
        worst = s["worst_residual"]
        if worst is None or v.residual > worst:
            s["worst_residual"] = v.residual


def run_suite(grid: Iterable[SequenceSpec], n_max: int = 30, seed: int = 0, *,
              plan: Optional[SuitePlan] = None, keep: str = "all",
              checks: Optional[Sequence[SuiteCheck]] = None) -> IdentityReport:
    """Run every registered check over ``grid`` and aggregate the verdicts.

    ``keep="nonpassing"`` retains only FAIL/FLAGGED/SKIP/exploratory verdicts
    (counts in the summary still cover everything), which keeps large grids
    in memory.  Output is sorted, so equal seeds give byte-identical JSON.
    """
    if keep not in ("all", "nonpassing"):
        raise ValueError("keep must be 'all' or 'nonpassing'")
    if plan is None:
        plan = SuitePlan(n_max=n_max, seed=seed)
    grid = list(dict.fromkeys(grid))
    checks = SUITE if checks is None else checks
    verdicts: List[IdentityVerdict] = []
    summary: Dict[str, Dict[str, object]] = {}
    for spec in grid:
        ctx = SpecContext(spec, swap_labels=plan.swap_labels)
        for check in checks:
            for v in check(ctx, plan):
                _summarize(summary, v)
                if keep == "all" or not v.passed or v.exploratory:
                    verdicts.append(v)
    verdicts.sort(key=IdentityVerdict.sort_key)
    return IdentityReport(seed=plan.seed, grid=grid, verdicts=verdicts, summary=summary)


__all__ = [
    "IdentityId", "IdentityReport", "IdentityVerdict", "Mode", "SUITE", "SpecContext",
    "Status", "SubseqSumFactors", "SuitePlan", "check_H_square", "check_convolution",
    "check_decomposition", "check_h_square", "check_initial_matrix", "check_power_laws",
    "check_products", "check_square_scalar", "check_sum_geometric", "check_sum_subsequence",
    "geometric_sum_closed", "nu", "run_suite", "subseq_factors", "suite_check", "sweep_sum_geometric",
    "sweep_sum_subsequence",
]

