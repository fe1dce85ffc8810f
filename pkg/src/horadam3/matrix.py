"""Exact 3x3 rational matrices and the matrix sequences M_H(n), M_h(n).

``M_h(n)`` is the n-th power of the companion matrix::

    M_h(1) = [[r, s, t],
              [1, 0, 0],
              [0, 1, 0]]

and is evaluated by binary exponentiation.  The entry layout of both matrix
sequences is::

    [[X[n+1], s X[n]   + t X[n-1], t X[n]  ],
     [X[n],   s X[n-1] + t X[n-2], t X[n-1]],
     [X[n-1], s X[n-2] + t X[n-3], t X[n-2]]]

with ``X = h`` or ``X = H``; :func:`mh_closed` and :func:`mH_closed` build
matrices straight from this layout and serve as the oracle for the fast path.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence, Tuple

from .sequence import SequenceSpec, TermTable

Row = Tuple[Fraction, Fraction, Fraction]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _reduced(nums: Tuple[int, ...], den: int) -> "Mat3":
    if den != 1:
        g = gcd(den, *nums)
        if g != 1:
            nums = tuple(v // g for v in nums)
            den //= g
    m = Mat3.__new__(Mat3)
    object.__setattr__(m, "_nums", nums)
    object.__setattr__(m, "_den", den)
    return m


class Mat3:
    """Immutable 3x3 matrix over the rationals.

    Entries are stored as nine integers over one positive common denominator
    kept in lowest terms, so arithmetic runs on plain ints; indexing and
    :attr:`rows` hand out :class:`fractions.Fraction` values.
    """

    __slots__ = ("_nums", "_den")

    def __init__(self, rows: Iterable[Iterable]):
        flat = [v for row in rows for v in row]
        if len(flat) != 9:
            raise ValueError("Mat3 needs exactly 3 rows of 3 entries")
        if all(type(v) is int for v in flat):
            nums, den = tuple(flat), 1
        else:
            flat = [_frac(v) for v in flat]
            den = 1
            for v in flat:
                d = v.denominator
                if d != 1 and den % d:
                    den = den // gcd(den, d) * d
            nums = tuple(v.numerator * (den // v.denominator) for v in flat)
        reduced = _reduced(nums, den)
        object.__setattr__(self, "_nums", reduced._nums)
        object.__setattr__(self, "_den", reduced._den)

    def __setattr__(self, name, value):
        raise AttributeError("Mat3 is immutable")

    @classmethod
    def from_ints(cls, nums: Sequence[int], den: int = 1) -> "Mat3":
        if den <= 0:
            raise ValueError("denominator must be positive")
        return _reduced(tuple(nums), den)

    @classmethod
    def identity(cls) -> "Mat3":
        return _reduced((1, 0, 0, 0, 1, 0, 0, 0, 1), 1)

    @classmethod
    def zero(cls) -> "Mat3":
        return _reduced((0,) * 9, 1)

    @property
    def rows(self) -> Tuple[Row, Row, Row]:
        n, d = self._nums, self._den
        return tuple(tuple(Fraction(n[3 * i + j], d) for j in range(3)) for i in range(3))

    def __getitem__(self, ij: Tuple[int, int]) -> Fraction:
        i, j = ij
        return Fraction(self._nums[3 * i + j], self._den)

    def __iter__(self):
        return iter(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat3):
            return NotImplemented
        return self._den == other._den and self._nums == other._nums

    def __hash__(self) -> int:
        return hash((self._nums, self._den))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(v) for v in row) + "]" for row in self.rows)
        return f"Mat3([{body}])"

    def _aligned(self, other: "Mat3"):
        d1, d2 = self._den, other._den
        if d1 == d2:
            return self._nums, other._nums, d1
        g = gcd(d1, d2)
        f1, f2 = d2 // g, d1 // g
        return tuple(v * f1 for v in self._nums), tuple(v * f2 for v in other._nums), d1 * f1

    def __add__(self, other: "Mat3") -> "Mat3":
        x, y, d = self._aligned(other)
        return _reduced(tuple(p + q for p, q in zip(x, y)), d)

    def __sub__(self, other: "Mat3") -> "Mat3":
        x, y, d = self._aligned(other)
        return _reduced(tuple(p - q for p, q in zip(x, y)), d)

    def __neg__(self) -> "Mat3":
        return _reduced(tuple(-v for v in self._nums), self._den)

    def __mul__(self, k) -> "Mat3":
        if isinstance(k, Mat3):
            raise TypeError("use @ for matrix products")
        k = _frac(k)
        p, q = k.numerator, k.denominator
        return _reduced(tuple(p * v for v in self._nums), self._den * q)

    __rmul__ = __mul__

    def __truediv__(self, k) -> "Mat3":
        k = _frac(k)
        if k == 0:
            raise ZeroDivisionError("Mat3 divided by zero")
        p, q = k.numerator, k.denominator
        if p < 0:
            p, q = -p, -q
        return _reduced(tuple(q * v for v in self._nums), self._den * p)

    def __matmul__(self, other: "Mat3") -> "Mat3":
        a00, a01, a02, a10, a11, a12, a20, a21, a22 = self._nums
        b00, b01, b02, b10, b11, b12, b20, b21, b22 = other._nums
        return _reduced((
            a00 * b00 + a01 * b10 + a02 * b20, a00 * b01 + a01 * b11 + a02 * b21, a00 * b02 + a01 * b12 + a02 * b22,
            a10 * b00 + a11 * b10 + a12 * b20, a10 * b01 + a11 * b11 + a12 * b21, a10 * b02 + a11 * b12 + a12 * b22,
            a20 * b00 + a21 * b10 + a22 * b20, a20 * b01 + a21 * b11 + a22 * b21, a20 * b02 + a21 * b12 + a22 * b22,
        ), self._den * other._den)

    def __pow__(self, k: int) -> "Mat3":
        if k < 0:
            return self.inverse() ** (-k)
        return _binary_power(self, k)

    def det(self) -> Fraction:
        a, b, c, d, e, f, g, h, i = self._nums
        num = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
        return Fraction(num, self._den**3)

    def inverse(self) -> "Mat3":
        a, b, c, d, e, f, g, h, i = self._nums
        det_num = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
        if det_num == 0:
            raise ZeroDivisionError("singular matrix")
        adj = (
            e * i - f * h, c * h - b * i, b * f - c * e,
            f * g - d * i, a * i - c * g, c * d - a * f,
            d * h - e * g, b * g - a * h, a * e - b * d,
        )
        # inverse = adj(N) * den / det(N), with N the integer numerator matrix
        if det_num < 0:
            adj, det_num = tuple(-v for v in adj), -det_num
        return _reduced(tuple(v * self._den for v in adj), det_num)

    def max_abs(self) -> Fraction:
        return Fraction(max(abs(v) for v in self._nums), self._den)

    def to_list(self):
        return [list(row) for row in self.rows]

    def to_floats(self) -> Tuple[float, ...]:
        """Row-major entries as floats (each correctly rounded)."""
        d = self._den
        return tuple(v / d for v in self._nums)

    def to_float(self):
        import numpy as np

        return np.array(self.to_floats(), dtype=float).reshape(3, 3)


def mat_mul(x: Mat3, y: Mat3) -> Mat3:
    """Exact product ``x @ y``."""
    return x @ y


@dataclass
class MulCounter:
    """Tally of 3x3 matrix multiplications performed by a power computation."""

    count: int = 0


def _binary_power(base: Mat3, k: int, counter: Optional[MulCounter] = None) -> Mat3:
    # left-to-right square-and-multiply; never multiplies by the identity
    if k == 0:
        return Mat3.identity()
    result = base
    for bit in bin(k)[3:]:
        result = result @ result
        if counter is not None:
            counter.count += 1
        if bit == "1":
            result = result @ base
            if counter is not None:
                counter.count += 1
    return result


def mh_one(spec: SequenceSpec) -> Mat3:
    r, s, t = spec.coefficients
    return Mat3(((r, s, t), (1, 0, 0), (0, 1, 0)))


def mh_pow(spec: SequenceSpec, n: int, counter: Optional[MulCounter] = None) -> Mat3:
    """``M_h(n) = M_h(1)^n`` by binary exponentiation; negative ``n`` uses the exact inverse.

    Performs at most ``2*ceil(log2 |n|)`` multiplications; pass a
    :class:`MulCounter` to record the exact number.
    """
    base = mh_one(spec)
    if n < 0:
        base = base.inverse()
        n = -n
    return _binary_power(base, n, counter)


def _layout(X, s: int, t: int, n: int) -> Mat3:
    return Mat3((
        (X[n + 1], s * X[n] + t * X[n - 1], t * X[n]),
        (X[n], s * X[n - 1] + t * X[n - 2], t * X[n - 1]),
        (X[n - 1], s * X[n - 2] + t * X[n - 3], t * X[n - 2]),
    ))


def matrix_from_terms(spec: SequenceSpec, terms, n: int) -> Mat3:
    """Closed-form matrix at index ``n`` for any term source indexable by integers."""
    return _layout(terms, spec.s, spec.t, n)


def mh_closed(spec: SequenceSpec, n: int, table: Optional[TermTable] = None) -> Mat3:
    """``M_h(n)`` assembled entry by entry from generalized Tribonacci terms."""
    if table is None:
        table = TermTable(spec.tribonacci())
    return _layout(table, spec.s, spec.t, n)


def mH_closed(spec: SequenceSpec, n: int, table: Optional[TermTable] = None) -> Mat3:
    """``M_H(n)`` assembled entry by entry from third-order Horadam terms."""
    if table is None:
        table = TermTable(spec)
    return _layout(table, spec.s, spec.t, n)


def mH_pow(spec: SequenceSpec, n: int, counter: Optional[MulCounter] = None) -> Mat3:
    """``M_H(n) = M_H(1) @ M_h(n-1)``, so also logarithmic in ``|n|``."""
    prod = mH_closed(spec, 1) @ mh_pow(spec, n - 1, counter)
    if counter is not None:
        counter.count += 1
    return prod


def mH0_printed(spec: SequenceSpec) -> Mat3:
    """The initial matrix ``M_H(0)`` with the entries exactly as published.

    Kept for comparison only: its (row 3, column 2) entry is ``-r H[-1]``
    whereas the layout demands ``s H[-2] + t H[-3] = a - r H[-1]``; the two
    differ whenever ``a != 0``.  The package always uses :func:`mH_closed`.
    """
    r, s, t, a, b, c = spec.as_tuple()
    return Mat3((
        (b, c - r * b, t * a),
        (a, b - r * a, c - r * b - s * a),
        ((c - r * b - s * a) / t, Fraction(r, t) * (-c + r * b + s * a),
         (-s * c + (t + r * s) * b + (s * s - r * t) * a) / t),
    ))


def fast_term(spec: SequenceSpec, n: int, counter: Optional[MulCounter] = None) -> Tuple[Fraction, Fraction]:
    """``(H[n], h[n])`` in O(log |n|) matrix multiplications.

    ``h[n]`` is read from row 2, column 1 of ``M_h(n)``; ``H[n]`` follows from
    ``H[n] = b h[n] + (c - r b) h[n-1] + t a h[n-2]``, where ``h[n-1]`` is the
    row 3, column 1 entry and ``t h[n-2]`` the row 3, column 3 entry.
    """
    M = mh_pow(spec, n, counter)
    hn, hn1, t_hn2 = M[1, 0], M[2, 0], M[2, 2]
    Hn = spec.b * hn + (spec.c - spec.r * spec.b) * hn1 + spec.a * t_hn2
    return Hn, hn


def matrix_sum(mats: Sequence[Mat3]) -> Mat3:
    total = Mat3.zero()
    for m in mats:
        total = total + m
    return total
