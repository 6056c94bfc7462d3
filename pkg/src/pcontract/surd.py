"""Exact numbers ``a + b*sqrt(d)`` with rational ``a, b`` and a fixed squarefree ``d``.

Enough of a field for polygons whose edge lengths are all rational multiples
of one square root, such as the right isosceles triangle.
"""

from __future__ import annotations

from functools import total_ordering
from math import isqrt

from gmpy2 import mpq

from .intervals import fmt, rational


def squarefree_split(n: int) -> tuple[int, int]:
    """``(s, d)`` with ``n == s*s*d`` and ``d`` squarefree."""
    if n <= 0:
        raise ValueError("need a positive integer")
    s, d = 1, 1
    p = 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            d *= p
        p += 1
    return s, d * n


@total_ordering
class Surd:
    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d: int = 1):
        if isinstance(a, Surd):
            if b:
                raise TypeError("a Surd argument takes no extra coefficient")
            a, b, d = a.a, a.b, a.d
        self.a = rational(a)
        self.b = rational(b)
        if d == 1 and self.b:
            self.a += self.b
            self.b = mpq(0)
        self.d = d if self.b else 1

    @classmethod
    def sqrt(cls, q) -> "Surd":
        """Exact square root of a non-negative rational."""
        q = rational(q)
        if q < 0:
            raise ValueError("negative radicand")
        if q == 0:
            return cls(0)
        num, den = int(q.numerator), int(q.denominator)
        s, d = squarefree_split(num * den)
        return cls(0, mpq(s, den), d) if d != 1 else cls(mpq(s, den))

    @staticmethod
    def _lift(x) -> "Surd":
        return x if isinstance(x, Surd) else Surd(x)

    def _common(self, other):
        o = self._lift(other)
        if self.d != 1 and o.d != 1 and self.d != o.d:
            raise ValueError(f"cannot combine sqrt({self.d}) and sqrt({o.d})")
        return o, (self.d if self.d != 1 else o.d)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def to_rational(self) -> mpq:
        if self.b:
            raise ValueError(f"{self} is irrational")
        return self.a

    def __add__(self, other):
        o, d = self._common(other)
        return Surd(self.a + o.a, self.b + o.b, d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o, d = self._common(other)
        return Surd(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conjugate(self):
        return Surd(self.a, -self.b, self.d)

    def norm(self) -> mpq:
        return self.a * self.a - self.b * self.b * self.d

    def __truediv__(self, other):
        o, d = self._common(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return self * o.conjugate() * Surd(1 / n)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0 or sa == sb:
            return sa or sb
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with b^2 d
        return sa if a * a > b * b * self.d else sb

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return (self - o).sign() == 0

    def __lt__(self, other):
        return (self - self._lift(other)).sign() < 0

    def __hash__(self):
        return hash((self.a, self.b, self.d)) if self.b else hash(self.a)

    def __float__(self):
        return float(self.a) + float(self.b) * self.d ** 0.5

    def __repr__(self):
        return f"Surd({self})"

    def __str__(self):
        if not self.b:
            return fmt(self.a)
        coef = "" if abs(self.b) == 1 else fmt(abs(self.b)) + "*"
        root = f"{coef}sqrt({self.d})"
        if not self.a:
            return root if self.b > 0 else "-" + root
        return f"{fmt(self.a)} {'+' if self.b > 0 else '-'} {root}"
