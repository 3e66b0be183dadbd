"""Exact scalars in Q or a real quadratic field Q(sqrt d).

All metric computations in the package run on :class:`QuadScalar`.  A value
is ``p + q*sqrt(d)`` with rational ``p``, ``q`` and a square-free ``d > 1``;
rational values carry ``q == 0`` and ``d == 1``.  Comparisons are decided
exactly from the signs of ``p``, ``q`` and ``p**2 - d*q**2``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath

from .errors import StructuralError

__all__ = ["QuadScalar", "as_scalar", "parse_scalar", "squarefree_part", "floor_scalar"]


@lru_cache(maxsize=None)
def squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s * f**2`` and ``s`` square-free."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    s, f = 1, 1
    m = n
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            f *= p
        if m % p == 0:
            m //= p
            s *= p
        p += 1
    return s * m, f


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


class QuadScalar:
    """An exact element ``p + q*sqrt(d)`` of Q(sqrt d)."""

    __slots__ = ("p", "q", "d")

    def __init__(self, p=0, q=0, d: int = 1):
        p = _frac(p)
        q = _frac(q)
        if q == 0:
            d = 1
        elif d <= 1 or squarefree_part(d)[1] != 1:
            raise ValueError(f"d must be a square-free integer > 1, got {d}")
        self.p = p
        self.q = q
        self.d = d

    @classmethod
    def sqrt(cls, n: int) -> QuadScalar:
        """Exact square root of a non-negative integer."""
        if n == 0:
            return cls(0)
        s, f = squarefree_part(n)
        if s == 1:
            return cls(f)
        return cls(0, f, s)

    @property
    def kind(self) -> str:
        return "rational" if self.q == 0 else "quadratic"

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    # -- coercion -----------------------------------------------------------
    def _common(self, other) -> tuple[QuadScalar, int] | None:
        if not isinstance(other, QuadScalar):
            try:
                other = QuadScalar(other)
            except TypeError:
                return None
        if self.d == 1:
            return other, other.d
        if other.d == 1 or other.d == self.d:
            return other, self.d
        raise StructuralError(f"cannot mix Q(sqrt {self.d}) and Q(sqrt {other.d})")

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        c = self._common(other)
        if c is None:
            return NotImplemented
        o, d = c
        return QuadScalar(self.p + o.p, self.q + o.q, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.p, -self.q, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        c = self._common(other)
        if c is None:
            return NotImplemented
        o, d = c
        return QuadScalar(self.p - o.p, self.q - o.q, d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        c = self._common(other)
        if c is None:
            return NotImplemented
        o, d = c
        return QuadScalar(self.p * o.p + d * self.q * o.q, self.p * o.q + self.q * o.p, d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm ``p**2 - d*q**2``."""
        return self.p * self.p - self.d * self.q * self.q

    def conjugate(self) -> QuadScalar:
        return QuadScalar(self.p, -self.q, self.d)

    def inverse(self) -> QuadScalar:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadScalar(self.p / n, -self.q / n, self.d)

    def __truediv__(self, other):
        c = self._common(other)
        if c is None:
            return NotImplemented
        return self * c[0].inverse()

    def __rtruediv__(self, other):
        try:
            return QuadScalar(other) * self.inverse()
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadScalar(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- order --------------------------------------------------------------
    def sign(self) -> int:
        """Exact sign of the value (-1, 0 or 1)."""
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        if p >= 0 and q > 0:
            return 1
        if p <= 0 and q < 0:
            return -1
        # p and q have opposite signs, both non-zero
        n = self.norm()
        return (1 if n > 0 else -1) if p > 0 else (-1 if n > 0 else 1)

    def _cmp(self, other) -> int | None:
        try:
            diff = self - other
        except TypeError:
            return None
        if diff is NotImplemented:
            return None
        return diff.sign()

    def __eq__(self, other):
        if isinstance(other, QuadScalar):
            return self.p == other.p and self.q == other.q and self.d == other.d
        if isinstance(other, (int, Rational)):
            return self.q == 0 and self.p == other
        return NotImplemented

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.p, self.q, self.d))

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __bool__(self):
        return self.p != 0 or self.q != 0

    # -- conversions --------------------------------------------------------
    def floor(self) -> int:
        """Exact floor, computed with integer square roots only."""
        if self.q == 0:
            return math.floor(self.p)
        den = math.lcm(self.p.denominator, self.q.denominator)
        P = int(self.p * den)
        A = int(self.q * den)
        M = A * A * self.d
        r = math.isqrt(M)
        if A >= 0:
            return (P + r) // den
        ceil_root = r if r * r == M else r + 1
        return (P - ceil_root) // den

    def __floor__(self):
        return self.floor()

    def to_fraction(self) -> Fraction:
        if self.q != 0:
            raise ValueError(f"{self} is irrational")
        return self.p

    def to_mpf(self, dps: int = 50):
        """High-precision value; the result is an ``mpmath.mpf``."""
        with mpmath.workdps(dps + 10):
            v = mpmath.mpf(self.p.numerator) / self.p.denominator
            if self.q:
                v += mpmath.mpf(self.q.numerator) / self.q.denominator * mpmath.sqrt(self.d)
            return +v

    def __float__(self):
        return float(self.p) + float(self.q) * math.sqrt(self.d)

    def __repr__(self):
        if self.q == 0:
            return f"QuadScalar({self.p})"
        return f"QuadScalar({self.p}, {self.q}, {self.d})"

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        mag = abs(self.q)
        root = f"sqrt({self.d})" if mag == 1 else f"{mag}*sqrt({self.d})"
        if self.p == 0:
            return root if self.q > 0 else f"-{root}"
        return f"{self.p} {'+' if self.q > 0 else '-'} {root}"


def as_scalar(x) -> QuadScalar:
    if isinstance(x, QuadScalar):
        return x
    return QuadScalar(x)


def floor_scalar(x) -> int:
    """Exact floor of an int, Fraction or QuadScalar."""
    if isinstance(x, QuadScalar):
        return x.floor()
    return math.floor(_frac(x))


_TERM_RE = re.compile(r"^(?P<coef>\d+(?:/\d+)?)?(?:(?P<star>\*)?sqrt\((?P<d>\d+)\))?$")


def parse_scalar(text: str | int) -> QuadScalar:
    """Parse a sum of rationals and rational multiples of one square root.

    Accepts the text produced by ``str(QuadScalar)``, e.g. ``3/2 + 1/2*sqrt(5)``.
    """
    if isinstance(text, int):
        return QuadScalar(text)
    compact = "".join(str(text).split())
    terms = re.findall(r"[+-]?[^+-]+", compact)
    if not compact or "".join(terms) != compact:
        raise ValueError(f"cannot parse exact scalar {text!r}")
    total = QuadScalar(0)
    for term in terms:
        sign = -1 if term[0] == "-" else 1
        m = _TERM_RE.match(term.lstrip("+-"))
        if not m or (m.group("coef") is None and m.group("d") is None) or \
                (m.group("star") and (m.group("coef") is None or m.group("d") is None)) or \
                (m.group("d") is not None and m.group("coef") is not None and not m.group("star")):
            raise ValueError(f"cannot parse exact scalar {text!r}")
        try:
            coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        except ZeroDivisionError:
            raise ValueError(f"cannot parse exact scalar {text!r}: zero denominator") from None
        value = QuadScalar(sign * coef)
        if m.group("d") is not None:
            value = value * QuadScalar.sqrt(int(m.group("d")))
        try:
            total = total + value
        except StructuralError as exc:
            raise ValueError(f"cannot parse exact scalar {text!r}: {exc}") from None
    return total
