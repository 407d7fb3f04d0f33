"""Exact arithmetic in imaginary quadratic fields Q(sqrt(d)), d < 0 squarefree.

A QuadNum is p + q*sqrt(d) with rational p, q.  The convention throughout is
that sqrt(d) denotes the root with positive imaginary part, so Im(p + q*sqrt(d))
has the sign of q.  Rationals are QuadNums with q == 0 (their d is then just a
field tag and is coerced freely).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def squarefree_kernel(n: int) -> int:
    """Largest squarefree divisor of n (sign preserved).  n != 0."""
    if n == 0:
        raise ValueError("squarefree kernel of 0 undefined")
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e % 2:
                out *= p
        p += 1 if p == 2 else 2
    return sign * out * n


def is_squarefree(n: int) -> bool:
    return n != 0 and squarefree_kernel(n) == n


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


@dataclass(frozen=True)
class QuadNum:
    """p + q*sqrt(d) with d < 0 squarefree."""

    p: Fraction
    q: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "p", _frac(self.p))
        object.__setattr__(self, "q", _frac(self.q))
        if self.d >= 0 or not is_squarefree(self.d):
            raise ValueError(f"d must be negative and squarefree, got {self.d}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rational(x, d: int = -1) -> "QuadNum":
        return QuadNum(_frac(x), Fraction(0), d)

    # -- field structure ---------------------------------------------------

    def _coerce(self, other) -> "QuadNum":
        if isinstance(other, QuadNum):
            if other.d != self.d and other.q != 0 and self.q != 0:
                raise ValueError(
                    f"incompatible quadratic fields: sqrt({self.d}) vs sqrt({other.d})"
                )
            d = self.d if self.q != 0 else (other.d if other.q != 0 else self.d)
            return QuadNum(other.p, other.q, d)
        if isinstance(other, (int, Fraction)):
            return QuadNum(_frac(other), Fraction(0), self.d)
        return NotImplemented

    def _same_d(self, other: "QuadNum") -> int:
        if self.q == 0:
            return other.d
        return self.d

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadNum(self.p + o.p, self.q + o.q, self._same_d(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadNum(-self.p, -self.q, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = self._same_d(o)
        return QuadNum(
            self.p * o.p + self.q * o.q * d,
            self.p * o.q + self.q * o.p,
            d,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """p^2 - d q^2 = |value|^2 (d < 0)."""
        return self.p * self.p - self.d * self.q * self.q

    def conj(self) -> "QuadNum":
        return QuadNum(self.p, -self.q, self.d)

    def inverse(self) -> "QuadNum":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadNum(self.p / n, -self.q / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.q == 0 and self.p == other
        if isinstance(other, QuadNum):
            if self.q == 0 and other.q == 0:
                return self.p == other.p
            return self.d == other.d and self.p == other.p and self.q == other.q
        return NotImplemented

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.p, self.q, self.d))

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def is_rational(self) -> bool:
        return self.q == 0

    # -- embedding into C --------------------------------------------------

    def abs_sq(self) -> Fraction:
        return self.norm()

    def __complex__(self) -> complex:
        import math

        return complex(self.p) + 1j * float(self.q) * math.sqrt(-self.d)

    def __repr__(self):
        if self.q == 0:
            return f"QuadNum({self.p})"
        return f"QuadNum({self.p} + {self.q}*sqrt({self.d}))"
