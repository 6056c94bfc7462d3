"""The conjugacy to a piecewise linear map with slopes of modulus 1/2.

Give every gap layer ``f^l(F_j)`` mass ``1 / (2^(l+1) r)`` spread uniformly
along it.  The resulting measure halves under ``f`` and has total mass 1, and
``h(x) = nu((0, x))`` conjugates ``f`` to a map whose pieces all have slope
``+1/2`` or ``-1/2``.

Only layers up to depth ``L`` are tabulated.  The remaining mass
``T = 2^-(L+1)`` sits somewhere in the uncovered set, so every value of
``h`` is known up to an enclosure of width at most ``T``.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

from gmpy2 import mpq

from .core import PiecewiseAffineContraction, ensure_valid
from .errors import OutOfDomain, ResolutionExceeded
from .gapflow import GapAtlas, compute_F, propagate
from .intervals import ONE, ZERO, SidedInterval, fmt, rational


@dataclass(frozen=True)
class Enclosure:
    lo: mpq
    hi: mpq

    @property
    def width(self) -> mpq:
        return self.hi - self.lo

    @property
    def mid(self) -> mpq:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains(self, other: "Enclosure") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __str__(self):
        return f"[{fmt(self.lo)}, {fmt(self.hi)}]"


class ConjugacyTable:
    """Layer masses sorted along ``[0, 1)`` with prefix sums, at depth ``L``."""

    def __init__(self, f: PiecewiseAffineContraction, L: int = 40, atlas: GapAtlas | None = None):
        ensure_valid(f)
        self.f = f
        self.L = L
        if atlas is None:
            atlas = compute_F(f)
        self.atlas = propagate(f, atlas, L)
        r = self.atlas.r
        rows = []
        for ls in self.atlas.layers:
            for ly in ls[: L + 1]:
                mass = mpq(1, (2 ** (ly.ell + 1)) * r)
                rows.append((ly.interval.lo, ly.interval.hi, mass))
        rows.sort()
        self.los = [a for a, _, _ in rows]
        self.his = [b for _, b, _ in rows]
        self.masses = [m for _, _, m in rows]
        self.starts = []
        acc = ZERO
        for m in self.masses:
            self.starts.append(acc)
            acc += m
        self.ends = [s + m for s, m in zip(self.starts, self.masses)]
        self.covered = acc
        self.tail = ONE - acc
        # uncovered stretches of positive length hold all of the tail mass
        gaps = []
        prev = ZERO
        for a, b in zip(self.los, self.his):
            if a > prev:
                gaps.append((prev, a))
            prev = max(prev, b)
        if prev < ONE:
            gaps.append((prev, ONE))
        self.tail_gaps = gaps
        self.first_gap_lo = gaps[0][0] if gaps else ONE
        self.last_gap_hi = gaps[-1][1] if gaps else ZERO

    # mass of the tabulated layers inside (0, x)
    def _prefix(self, x) -> mpq:
        i = bisect_right(self.los, x) - 1
        if i < 0:
            return ZERO
        if x < self.his[i]:
            return self.starts[i] + self.masses[i] * (x - self.los[i]) / (self.his[i] - self.los[i])
        return self.ends[i]

    def _prefix_inv_min(self, v) -> mpq:
        """Least ``x`` with ``prefix(x) >= v``."""
        if v <= 0:
            return ZERO
        i = bisect_left(self.ends, v)
        if i >= len(self.ends):
            return ONE
        lo, hi = self.los[i], self.his[i]
        return lo + (v - self.starts[i]) / self.masses[i] * (hi - lo)

    def _prefix_inv_max(self, v) -> mpq:
        """Greatest ``x`` with ``prefix(x) <= v``."""
        i = bisect_right(self.starts, v)
        if i == 0:
            return self.los[0] if self.los else ONE
        k = i - 1
        if v < self.ends[k]:
            lo, hi = self.los[k], self.his[k]
            return lo + (v - self.starts[k]) / self.masses[k] * (hi - lo)
        return self.los[i] if i < len(self.los) else ONE

    def h(self, x) -> Enclosure:
        """Enclosure of ``nu((0, x))``."""
        x = rational(x)
        if not (ZERO <= x <= ONE):
            raise OutOfDomain(f"{fmt(x)} is not in [0, 1]")
        p = self._prefix(x)
        lo = p + (self.tail if x >= self.last_gap_hi else ZERO)
        hi = p + (self.tail if x > self.first_gap_lo else ZERO)
        return Enclosure(lo, hi)

    def h_inverse(self, y, tol=None) -> Enclosure:
        """Enclosure of ``h^-1(y)``; raises ``ResolutionExceeded`` if wider than ``tol``."""
        y = rational(y)
        if not (ZERO <= y <= ONE):
            raise OutOfDomain(f"{fmt(y)} is not in [0, 1]")
        T = self.tail
        a, b = self.first_gap_lo, self.last_gap_hi
        if self._prefix(a) >= y:
            x1 = self._prefix_inv_min(y)
        else:
            x1 = max(a, self._prefix_inv_min(y - T))
        if self._prefix(b) + T <= y:
            x2 = self._prefix_inv_max(y - T)
        else:
            x2 = min(b, self._prefix_inv_max(y))
        x1, x2 = min(x1, x2), max(x1, x2)
        enc = Enclosure(x1, x2)
        if tol is not None and enc.width > rational(tol):
            raise ResolutionExceeded(f"h^-1({fmt(y)}) only known to width {float(enc.width):.3g} at depth {self.L}")
        return enc

    def nu(self, J: SidedInterval) -> Enclosure:
        """Enclosure of ``nu(J)``; endpoint flags do not matter."""
        core = self._prefix(J.hi) - self._prefix(J.lo)
        inside_all = all(J.lo <= a and b <= J.hi for a, b in self.tail_gaps)
        meets = any(max(a, J.lo) < min(b, J.hi) for a, b in self.tail_gaps)
        return Enclosure(core + (self.tail if inside_all and self.tail_gaps else ZERO), core + (self.tail if meets else ZERO))

    def breakpoint_images(self) -> list[Enclosure]:
        return [self.h(x) for x in self.f.breakpoints]

    def normalized(self, y) -> Enclosure:
        """Enclosure of ``h(f(h^-1(y)))`` for ``y`` well inside one ``h(I_i)``."""
        xs = self.h_inverse(y)
        f = self.f
        i, j = f.piece_index(xs.lo), f.piece_index(xs.hi)
        if i != j:
            raise ResolutionExceeded(f"h^-1({fmt(y)}) straddles a breakpoint at depth {self.L}")
        pc = f.pieces[i]
        a, b = pc(xs.lo), pc(xs.hi)
        if a > b:
            a, b = b, a
        return Enclosure(self.h(a).lo, self.h(b).hi)


def nu_of_interval(f_or_table, J: SidedInterval, L: int = 40) -> Enclosure:
    table = f_or_table if isinstance(f_or_table, ConjugacyTable) else ConjugacyTable(f_or_table, L)
    return table.nu(J)


def h_value(table: ConjugacyTable, x) -> Enclosure:
    x = rational(x)
    if not (ZERO <= x < ONE):
        raise OutOfDomain(f"{fmt(x)} is not in [0, 1)")
    return table.h(x)


def h_inverse(table: ConjugacyTable, y, tol) -> Enclosure:
    y = rational(y)
    if not (ZERO <= y < ONE):
        raise OutOfDomain(f"{fmt(y)} is not in [0, 1)")
    return table.h_inverse(y, tol)


@dataclass
class PieceSlope:
    piece: int
    expected: mpq
    low: mpq
    high: mpq
    pairs: int
    ok: bool

    def to_json(self) -> dict:
        return {
            "piece": self.piece + 1,
            "expected": fmt(self.expected),
            "quotient_low": float(self.low),
            "quotient_high": float(self.high),
            "pairs": self.pairs,
            "ok": self.ok,
        }


@dataclass
class SlopeReport:
    depth: int
    tol: mpq
    pieces: list[PieceSlope] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.pieces)

    @property
    def max_deviation(self) -> mpq:
        return max((max(abs(p.low - p.expected), abs(p.high - p.expected)) for p in self.pieces), default=ZERO)

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "tol": fmt(self.tol),
            "ok": self.ok,
            "max_deviation": float(self.max_deviation),
            "pieces": [p.to_json() for p in self.pieces],
        }


def verify_half_slopes(f: PiecewiseAffineContraction, table: ConjugacyTable | None = None, samples_per_piece: int = 100, tol="1/100000", L: int = 40) -> SlopeReport:
    """Difference quotients of the normalized map on each ``h(I_i)``.

    Pairs ``u < v`` are placed symmetrically about the middle of the piece
    image, keeping a margin of a tenth of its width from either end so the
    pulled-back enclosures stay inside one piece.
    """
    if table is None:
        table = ConjugacyTable(f, L)
    tol = rational(tol)
    rep = SlopeReport(table.L, tol)
    xs = f.breakpoints
    for i, pc in enumerate(f.pieces):
        a = table.h(xs[i]).hi
        b = table.h(xs[i + 1]).lo
        w = b - a
        if w <= 0:
            raise ResolutionExceeded(f"h(I_{i + 1}) is not resolved at depth {table.L}")
        lo_q = hi_q = None
        expected = mpq(1, 2) if pc.slope > 0 else mpq(-1, 2)
        span = 2 * samples_per_piece
        for k in range(samples_per_piece):
            t = mpq(k, span)
            u = a + w * (mpq(1, 10) + t * mpq(4, 10))
            v = b - w * (mpq(1, 10) + t * mpq(4, 10))
            hu, hv = table.normalized(u), table.normalized(v)
            d = v - u
            q1, q2 = (hv.lo - hu.hi) / d, (hv.hi - hu.lo) / d
            if q2 - q1 > tol:
                raise ResolutionExceeded(f"quotient on piece {i + 1} only known to width {float(q2 - q1):.3g}")
            lo_q = q1 if lo_q is None else min(lo_q, q1)
            hi_q = q2 if hi_q is None else max(hi_q, q2)
        ok = abs(lo_q - expected) <= tol and abs(hi_q - expected) <= tol
        rep.pieces.append(PieceSlope(i, expected, lo_q, hi_q, samples_per_piece, ok))
    return rep


def snap_normal_form(f: PiecewiseAffineContraction, table: ConjugacyTable) -> PiecewiseAffineContraction:
    """Approximate normal form: breakpoints at enclosure midpoints, slopes set to +-1/2.

    Not validated and not exact; each intercept is fitted at the middle of its piece.
    """
    xs = [table.h(x).mid for x in f.breakpoints[:-1]] + [ONE]
    xs[0] = ZERO
    slopes, intercepts, owners = [], [], []
    for i, pc in enumerate(f.pieces):
        s = mpq(1, 2) if pc.slope > 0 else mpq(-1, 2)
        c = (xs[i] + xs[i + 1]) / 2
        try:
            val = table.normalized(c).mid
        except ResolutionExceeded:
            val = table.h(pc((f.breakpoints[i] + f.breakpoints[i + 1]) / 2)).mid
        slopes.append(s)
        intercepts.append(val - s * c)
        if i < f.n - 1:
            owners.append(f.owner(i + 1))
    g = PiecewiseAffineContraction.from_breakpoints(xs, slopes, intercepts, owners, name=f"approximate normal form of {f.name or 'map'}")
    return g
