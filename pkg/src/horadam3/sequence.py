"""Third-order Horadam sequences and their generalized Tribonacci companions.

A sequence is fixed by six numbers: the recurrence coefficients ``(r, s, t)``
and the initial values ``(a, b, c)``::

    H[0] = a, H[1] = b, H[2] = c
    H[n+3] = r*H[n+2] + s*H[n+1] + t*H[n]

The generalized Tribonacci sequence ``h`` uses the same coefficients with the
initial values ``(0, 1, r)``. Both sequences extend to negative indices by
running the recurrence backwards, which divides by ``t`` at every step, so
terms are exact rationals (:class:`fractions.Fraction`).

Everything here is deliberately O(n); the logarithmic-time path lives in
:mod:`horadam3.matrix` and is checked against this module.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterator, List, Tuple, Union

from .errors import EmptyRangeError, ZeroTError

RationalLike = Union[int, Fraction, str]


def _as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise TypeError(f"floats are not exact; pass an int, Fraction or 'p/q' string, got {value!r}")
    return Fraction(value)


def _as_int(value, name: str) -> int:
    if isinstance(value, bool):
        raise TypeError(f"{name} must be an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, Rational) and value.denominator == 1:
        return int(value.numerator)
    raise TypeError(f"{name} must be an integer, got {value!r}")


def discriminant(r: int, s: int, t: int) -> Fraction:
    """Exact value of the Cardano discriminant of ``x^3 - r x^2 - s x - t``.

    Positive iff the cubic has one real root and a pair of complex conjugate
    roots.
    """
    r, s, t = Fraction(r), Fraction(s), Fraction(t)
    return (r**3 * t / 27 - r**2 * s**2 / 108 + r * s * t / 6
            - s**3 / 27 + t**2 / 4)


@dataclass(frozen=True)
class SequenceSpec:
    """Immutable parameter set ``(r, s, t; a, b, c)`` of a sequence pair (H, h)."""

    r: int
    s: int
    t: int
    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        for name in ("r", "s", "t"):
            object.__setattr__(self, name, _as_int(getattr(self, name), name))
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _as_fraction(getattr(self, name)))
        if self.t == 0:
            raise ZeroTError("t must be nonzero (the backward recurrence divides by t)")

    @property
    def delta(self) -> Fraction:
        return discriminant(self.r, self.s, self.t)

    @property
    def binet_available(self) -> bool:
        return self.delta > 0

    @property
    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in (self.a, self.b, self.c))

    @property
    def coefficients(self) -> Tuple[int, int, int]:
        return (self.r, self.s, self.t)

    @property
    def initial(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c)

    def tribonacci(self) -> "SequenceSpec":
        """The generalized Tribonacci spec ``(r, s, t; 0, 1, r)`` sharing these coefficients."""
        return SequenceSpec(self.r, self.s, self.t, 0, 1, self.r)

    def as_tuple(self) -> Tuple[int, int, int, Fraction, Fraction, Fraction]:
        return (self.r, self.s, self.t, self.a, self.b, self.c)

    def label(self) -> str:
        return "({},{},{};{},{},{})".format(*self.as_tuple())

    def __str__(self) -> str:
        return self.label()


def make_spec(r: int, s: int, t: int,
              a: RationalLike, b: RationalLike, c: RationalLike) -> SequenceSpec:
    """Build a :class:`SequenceSpec`; raises :class:`ZeroTError` when ``t == 0``."""
    return SequenceSpec(r, s, t, a, b, c)


def _normalize(x):
    # keep integral values as plain ints so forward iteration stays in int arithmetic
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _scaled(k: int, x):
    if k == 1:
        return x
    if k == -1:
        return -x
    return k * x


def _combine(r: int, s: int, t: int, x2, x1, x0):
    """``r*x2 + s*x1 + t*x0`` without multiplying by unit or zero coefficients."""
    acc = None
    for k, v in ((r, x2), (s, x1), (t, x0)):
        if k == 0:
            continue
        term = _scaled(k, v)
        acc = term if acc is None else acc + term
    return 0 if acc is None else acc


class TermCache:
    """A window of three consecutive terms that slides in either direction.

    ``window`` holds ``(X[base], X[base+1], X[base+2])``.  Moving forward applies
    the recurrence; moving backward applies its inverse
    ``X[n] = (X[n+3] - r X[n+2] - s X[n+1]) / t``.
    """

    def __init__(self, spec: SequenceSpec, initial=None, base: int = 0):
        self.spec = spec
        init = spec.initial if initial is None else initial
        self.window = tuple(_normalize(Fraction(v)) for v in init)
        self.base = base
        self.steps = 0

    def forward(self) -> None:
        x0, x1, x2 = self.window
        r, s, t = self.spec.coefficients
        self.window = (x1, x2, _combine(r, s, t, x2, x1, x0))
        self.base += 1
        self.steps += 1

    def backward(self) -> None:
        x0, x1, x2 = self.window
        r, s, t = self.spec.coefficients
        num = x2 - _combine(r, s, 0, x1, x0, 0)
        prev = Fraction(num, t) if isinstance(num, int) else num / t
        self.window = (_normalize(prev), x0, x1)
        self.base -= 1
        self.steps += 1

    def seek(self, base: int) -> None:
        """Slide until the window starts at ``base``."""
        while self.base < base:
            self.forward()
        while self.base > base:
            self.backward()

    def __getitem__(self, n: int) -> Fraction:
        if not self.base <= n <= self.base + 2:
            if n > self.base + 2:
                self.seek(n - 2)
            else:
                self.seek(n)
        return Fraction(self.window[n - self.base])

    def terms(self) -> Tuple[Fraction, Fraction, Fraction]:
        return tuple(Fraction(v) for v in self.window)


def horadam_term(spec: SequenceSpec, n: int) -> Fraction:
    """Exact ``H[n]`` for any integer ``n`` by plain iteration (O(|n|) steps)."""
    return TermCache(spec)[n]


def tribonacci_term(spec: SequenceSpec, n: int) -> Fraction:
    """Exact generalized Tribonacci term ``h[n]`` for the coefficients of ``spec``."""
    return TermCache(spec.tribonacci())[n]


def iter_terms(spec: SequenceSpec, lo: int, hi: int) -> Iterator[Tuple[int, Fraction]]:
    """Yield ``(n, H[n])`` for ``lo <= n <= hi`` with one sliding window."""
    if lo > hi:
        raise EmptyRangeError(f"empty range [{lo}, {hi}]")
    cache = TermCache(spec)
    cache.seek(lo)
    for n in range(lo, hi + 1):
        yield n, cache[n]


def term_range(spec: SequenceSpec, lo: int, hi: int) -> List[Tuple[int, Fraction, Fraction]]:
    """Rows ``(n, H[n], h[n])`` for every ``n`` in ``[lo, hi]``."""
    H = iter_terms(spec, lo, hi)
    h = iter_terms(spec.tribonacci(), lo, hi)
    return [(n, Hn, hn) for (n, Hn), (_, hn) in zip(H, h)]


class TermTable:
    """Memoized two-sided term lookup for a spec, grown on demand.

    Integral terms are stored as plain ``int`` (cheaper arithmetic), the rest
    as :class:`Fraction`.  Used by the identity checks, which touch many nearby
    indices.
    """

    def __init__(self, spec: SequenceSpec):
        self.spec = spec
        self._terms = {k: _normalize(v) for k, v in enumerate(spec.initial)}
        self._lo, self._hi = 0, 2

    def __getitem__(self, n: int):
        if n > self._hi:
            self._extend_up(n)
        elif n < self._lo:
            self._extend_down(n)
        return self._terms[n]

    def _extend_up(self, n: int) -> None:
        r, s, t = self.spec.coefficients
        T = self._terms
        for k in range(self._hi + 1, n + 1):
            T[k] = r * T[k - 1] + s * T[k - 2] + t * T[k - 3]
        self._hi = n

    def _extend_down(self, n: int) -> None:
        r, s, t = self.spec.coefficients
        T = self._terms
        for k in range(self._lo - 1, n - 1, -1):
            T[k] = _normalize(Fraction(T[k + 3] - r * T[k + 2] - s * T[k + 1]) / t)
        self._lo = n
