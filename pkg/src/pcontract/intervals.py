"""Exact rationals and side-flagged intervals.

Every coordinate in the package is a ``gmpy2.mpq``.  ``rational`` is the one
entry point that turns user input (ints, ``Fraction``, ``"p/q"`` strings) into
one; floats are refused because they would silently import rounding error.

A :class:`SidedInterval` is the universal set currency.  Finite unions are
plain sorted lists of pairwise disjoint, non-touching intervals; the helpers
below (``union``, ``complement``, ``intersect_sets`` ...) keep them in that
canonical form.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, NamedTuple

from gmpy2 import mpq

ZERO = mpq(0)
ONE = mpq(1)
HALF = mpq(1, 2)

_MPQ = type(mpq(0))


def rational(value) -> mpq:
    """Coerce ``value`` to an exact rational.

    >>> rational("16/27")
    mpq(16,27)
    >>> rational(3)
    mpq(3,1)
    """
    if isinstance(value, _MPQ):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction, Rational)):
        return mpq(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return mpq(text)
        except ValueError:
            raise ValueError(f"cannot parse {value!r} as an exact rational") from None
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return mpq(int(value.numerator), int(value.denominator))
    raise TypeError(f"refusing to convert {type(value).__name__} {value!r} to an exact rational")


def fmt(x) -> str:
    """Serialize a rational as ``"p/q"`` (or ``"p"`` when integral)."""
    x = rational(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def bits(x) -> int:
    """Bit size of the larger of numerator and denominator."""
    return max(abs(x.numerator).bit_length(), x.denominator.bit_length())


class SidedInterval(NamedTuple):
    """Interval with exact endpoints and per-endpoint closure flags.

    ``lo == hi`` is allowed only with both ends closed (a single point, used
    for images of points).  Use :meth:`make` for checked construction.
    """

    lo: mpq
    hi: mpq
    lo_closed: bool = True
    hi_closed: bool = False

    @classmethod
    def make(cls, lo, hi, lo_closed=True, hi_closed=False) -> "SidedInterval":
        lo, hi = rational(lo), rational(hi)
        if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
            raise ValueError(f"empty interval {_show(lo, hi, lo_closed, hi_closed)}")
        return cls(lo, hi, bool(lo_closed), bool(hi_closed))

    @classmethod
    def open(cls, lo, hi):
        return cls.make(lo, hi, False, False)

    @classmethod
    def closed(cls, lo, hi):
        return cls.make(lo, hi, True, True)

    @classmethod
    def point(cls, x):
        x = rational(x)
        return cls(x, x, True, True)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def length(self) -> mpq:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def interior(self) -> "SidedInterval | None":
        if self.is_point:
            return None
        return SidedInterval(self.lo, self.hi, False, False)

    def closure(self) -> "SidedInterval":
        return SidedInterval(self.lo, self.hi, True, True)

    def affine_image(self, slope, intercept) -> "SidedInterval":
        """Image under ``x -> slope*x + intercept``; flags swap when slope < 0."""
        a = slope * self.lo + intercept
        b = slope * self.hi + intercept
        if slope > 0:
            return SidedInterval(a, b, self.lo_closed, self.hi_closed)
        if slope < 0:
            return SidedInterval(b, a, self.hi_closed, self.lo_closed)
        return SidedInterval(intercept, intercept, True, True)

    def affine_preimage(self, slope, intercept) -> "SidedInterval":
        """Preimage under a non-constant affine map."""
        inv = 1 / slope
        return self.affine_image(inv, -intercept * inv)

    def midpoint(self) -> mpq:
        return (self.lo + self.hi) / 2

    def __str__(self) -> str:
        return _show(self.lo, self.hi, self.lo_closed, self.hi_closed)

    def to_json(self) -> dict:
        return {
            "lo": fmt(self.lo),
            "hi": fmt(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    @classmethod
    def from_json(cls, data) -> "SidedInterval":
        return cls.make(data["lo"], data["hi"], data["lo_closed"], data["hi_closed"])


def _show(lo, hi, lc, hc) -> str:
    if lo == hi and lc and hc:
        return "{" + fmt(lo) + "}"
    return f"{'[' if lc else '('}{fmt(lo)}, {fmt(hi)}{']' if hc else ')'}"


UNIT = SidedInterval(ZERO, ONE, True, False)


def intersect(a: SidedInterval, b: SidedInterval) -> SidedInterval | None:
    """Intersection of two intervals, or ``None`` when empty."""
    if a.lo > b.lo:
        lo, lc = a.lo, a.lo_closed
    elif a.lo < b.lo:
        lo, lc = b.lo, b.lo_closed
    else:
        lo, lc = a.lo, a.lo_closed and b.lo_closed
    if a.hi < b.hi:
        hi, hc = a.hi, a.hi_closed
    elif a.hi > b.hi:
        hi, hc = b.hi, b.hi_closed
    else:
        hi, hc = a.hi, a.hi_closed and b.hi_closed
    if lo < hi or (lo == hi and lc and hc):
        return SidedInterval(lo, hi, lc, hc)
    return None


def overlaps(a: SidedInterval, b: SidedInterval) -> bool:
    return intersect(a, b) is not None


def is_subset(a: SidedInterval, b: SidedInterval) -> bool:
    """``a`` is contained in ``b`` as a point set."""
    if a.lo < b.lo or (a.lo == b.lo and a.lo_closed and not b.lo_closed):
        return False
    if a.hi > b.hi or (a.hi == b.hi and a.hi_closed and not b.hi_closed):
        return False
    return True


def _sort_key(iv: SidedInterval):
    return (iv.lo, not iv.lo_closed, iv.hi, iv.hi_closed)


def _touch(a: SidedInterval, b: SidedInterval) -> bool:
    """Whether ``a`` (with ``a.lo <= b.lo``) and ``b`` overlap or abut into one interval."""
    if a.hi > b.lo:
        return True
    return a.hi == b.lo and (a.hi_closed or b.lo_closed)


def union(intervals: Iterable[SidedInterval]) -> list[SidedInterval]:
    """Canonical sorted union: overlapping or exactly abutting pieces are merged."""
    items = sorted(intervals, key=_sort_key)
    out: list[SidedInterval] = []
    for iv in items:
        if out and _touch(out[-1], iv):
            cur = out[-1]
            if iv.hi > cur.hi:
                out[-1] = SidedInterval(cur.lo, iv.hi, cur.lo_closed, iv.hi_closed)
            elif iv.hi == cur.hi and iv.hi_closed and not cur.hi_closed:
                out[-1] = SidedInterval(cur.lo, cur.hi, cur.lo_closed, True)
        else:
            out.append(iv)
    return out


def complement(intervals: Iterable[SidedInterval], within: SidedInterval = UNIT) -> list[SidedInterval]:
    """``within`` minus the union of ``intervals``."""
    out: list[SidedInterval] = []
    lo, lc = within.lo, within.lo_closed
    for iv in union(intervals):
        clipped = intersect(iv, within)
        if clipped is None:
            continue
        piece_hi, piece_hc = clipped.lo, not clipped.lo_closed
        if lo < piece_hi or (lo == piece_hi and lc and piece_hc):
            out.append(SidedInterval(lo, piece_hi, lc, piece_hc))
        lo, lc = clipped.hi, not clipped.hi_closed
    if lo < within.hi or (lo == within.hi and lc and within.hi_closed):
        out.append(SidedInterval(lo, within.hi, lc, within.hi_closed))
    return out


def intersect_sets(a: Iterable[SidedInterval], b: Iterable[SidedInterval]) -> list[SidedInterval]:
    a, b = union(a), union(b)
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        piece = intersect(a[i], b[j])
        if piece is not None:
            out.append(piece)
        if (a[i].hi, a[i].hi_closed) < (b[j].hi, b[j].hi_closed):
            i += 1
        else:
            j += 1
    return union(out)


def difference(a: Iterable[SidedInterval], b: Iterable[SidedInterval]) -> list[SidedInterval]:
    b = list(b)
    out = []
    for iv in union(a):
        out.extend(complement(b, within=iv) if not iv.is_point else ([] if any(iv.lo in x for x in b) else [iv]))
    return union(out)


def interior(intervals: Iterable[SidedInterval]) -> list[SidedInterval]:
    """Interior of a finite union: open components of positive length."""
    return [SidedInterval(iv.lo, iv.hi, False, False) for iv in union(intervals) if iv.lo < iv.hi]


def closure(intervals: Iterable[SidedInterval]) -> list[SidedInterval]:
    return union(iv.closure() for iv in intervals)


def measure(intervals: Iterable[SidedInterval]) -> mpq:
    return sum((iv.length for iv in union(intervals)), ZERO)


def set_contains(intervals: Iterable[SidedInterval], x) -> bool:
    return any(x in iv for iv in intervals)


def set_is_subset(a: SidedInterval, intervals: Iterable[SidedInterval]) -> bool:
    """``a`` lies inside one component of the canonical union ``intervals``."""
    return any(is_subset(a, iv) for iv in union(intervals))


def boundary_points(intervals: Iterable[SidedInterval]) -> list[mpq]:
    """Topological boundary of a finite union of intervals."""
    pts = []
    for iv in union(intervals):
        pts.append(iv.lo)
        if iv.hi != iv.lo:
            pts.append(iv.hi)
    return sorted(set(pts))
