"""Piecewise affine contractions of [0, 1) and their elementary dynamics.

A map is a list of affine pieces whose side-flagged domains partition
``[0, 1)``.  Each interior breakpoint belongs to exactly one of its two
neighbours, which at the same time fixes the value of the map there as one of
the two one-sided limits.

All arithmetic is exact (``gmpy2.mpq``).  Piece indices are 0-based in the
API (``piece_index``) and 1-based inside itinerary words, matching the usual
``I_1 .. I_n`` labelling.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Sequence

from gmpy2 import mpq

from .errors import ArithmeticBudgetExceeded, InvalidMap, OutOfDomain
from .intervals import (
    ONE,
    UNIT,
    ZERO,
    SidedInterval,
    bits,
    fmt,
    intersect,
    is_subset,
    rational,
    union,
)


class AffinePiece(NamedTuple):
    slope: mpq
    intercept: mpq
    domain: SidedInterval

    def __call__(self, x):
        return self.slope * x + self.intercept

    def image(self) -> SidedInterval:
        return self.domain.affine_image(self.slope, self.intercept)

    def left_limit(self):
        """Value approached at the right end of the domain."""
        return self.slope * self.domain.hi + self.intercept

    def right_limit(self):
        """Value approached at the left end of the domain."""
        return self.slope * self.domain.lo + self.intercept


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str


@dataclass
class ValidationReport:
    ok: bool
    kappa: mpq | None
    violations: list[Violation] = field(default_factory=list)

    def kinds(self) -> list[str]:
        return [v.kind for v in self.violations]


class PiecewiseAffineContraction:
    """``n`` affine pieces on a side-flagged partition of ``[0, 1)``.

    Construction does not validate; call :func:`validate` (or let any
    analysis routine do it through :func:`ensure_valid`).
    """

    __slots__ = ("pieces", "name", "notes", "_cuts", "_owner_left", "_report")

    def __init__(self, pieces: Sequence[AffinePiece], name: str | None = None):
        if not pieces:
            raise ValueError("a map needs at least one piece")
        self.pieces = tuple(
            AffinePiece(rational(p.slope), rational(p.intercept), p.domain) for p in pieces
        )
        self.name = name
        self.notes = None
        self._cuts = [p.domain.hi for p in self.pieces[:-1]]
        self._owner_left = [p.domain.hi_closed for p in self.pieces[:-1]]
        self._report: ValidationReport | None = None

    @classmethod
    def from_breakpoints(cls, breakpoints, slopes, intercepts, owners=None, name=None):
        """Build from ``x_0 = 0 < ... < x_n = 1`` and per-piece coefficients.

        ``owners[i]`` is ``"left"`` or ``"right"`` for the interior breakpoint
        ``x_{i+1}``; the default gives left-closed pieces ``[x_{i-1}, x_i)``.
        """
        xs = [rational(x) for x in breakpoints]
        n = len(xs) - 1
        if owners is None:
            owners = ["right"] * (n - 1)
        if len(slopes) != n or len(intercepts) != n or len(owners) != n - 1:
            raise ValueError("breakpoints, slopes, intercepts and owners disagree in length")
        pieces = []
        for i in range(n):
            lo_closed = i == 0 or owners[i - 1] == "right"
            hi_closed = i < n - 1 and owners[i] == "left"
            dom = SidedInterval(xs[i], xs[i + 1], lo_closed, hi_closed)
            pieces.append(AffinePiece(rational(slopes[i]), rational(intercepts[i]), dom))
        return cls(pieces, name=name)

    @property
    def n(self) -> int:
        return len(self.pieces)

    @property
    def breakpoints(self) -> list[mpq]:
        """``x_0 .. x_n``."""
        return [self.pieces[0].domain.lo] + [p.domain.hi for p in self.pieces]

    @property
    def interior_breakpoints(self) -> list[mpq]:
        return list(self._cuts)

    @property
    def kappa(self) -> mpq:
        return max(abs(p.slope) for p in self.pieces)

    def owner(self, i: int) -> str:
        """Owner side of the interior breakpoint ``x_i`` (1-based, ``0 < i < n``)."""
        return "left" if self._owner_left[i - 1] else "right"

    def piece_index(self, x) -> int:
        """0-based index of the piece whose domain contains ``x``."""
        i = bisect_right(self._cuts, x)
        if i and self._cuts[i - 1] == x and self._owner_left[i - 1]:
            return i - 1
        return i

    def piece_of(self, x) -> AffinePiece:
        return self.pieces[self.piece_index(x)]

    def side_piece(self, x, side: str) -> int:
        """Index of the piece containing the one-sided germ of ``x``.

        ``side`` is ``"R"`` for ``(x, x+d)`` and ``"L"`` for ``(x-d, x)``.
        """
        if side == "R":
            return bisect_right(self._cuts, x)
        i = bisect_right(self._cuts, x)
        if i and self._cuts[i - 1] == x:
            return i - 1
        return i

    def is_breakpoint(self, x) -> bool:
        i = bisect_right(self._cuts, x)
        return bool(i) and self._cuts[i - 1] == x

    def __call__(self, x):
        return evaluate(self, x)

    def __eq__(self, other):
        return isinstance(other, PiecewiseAffineContraction) and self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self):
        parts = []
        for p in self.pieces:
            parts.append(f"{p.domain}: {fmt(p.slope)}*x + {fmt(p.intercept)}")
        label = f"{self.name!r}, " if self.name else ""
        return f"PiecewiseAffineContraction({label}" + "; ".join(parts) + ")"


# ---------------------------------------------------------------------------
# validation


def validate(f: PiecewiseAffineContraction) -> ValidationReport:
    """Check partition, contraction, injectivity and invariance of ``[0, 1)``.

    Violation kinds: ``NotPartition``, ``NotInjective``, ``NonContractive``,
    ``ZeroSlope``, ``ImageEscapes`` and ``NoJump`` (an interior breakpoint
    where both one-sided limits agree, so it is not a jump discontinuity).
    """
    if f._report is not None:
        return f._report
    out: list[Violation] = []
    pcs = f.pieces
    doms = [p.domain for p in pcs]
    if doms[0].lo != ZERO or not doms[0].lo_closed:
        out.append(Violation("NotPartition", "0 must belong to the first piece"))
    if doms[-1].hi != ONE or doms[-1].hi_closed:
        out.append(Violation("NotPartition", "the last piece must be open at 1"))
    for i, d in enumerate(doms):
        if not d.lo < d.hi:
            out.append(Violation("NotPartition", f"piece {i + 1} has empty interior: {d}"))
    for i in range(len(doms) - 1):
        a, b = doms[i], doms[i + 1]
        if a.hi != b.lo:
            kind = "overlap" if a.hi > b.lo else "gap"
            out.append(Violation("NotPartition", f"pieces {i + 1} and {i + 2} {kind} at {fmt(a.hi)} / {fmt(b.lo)}"))
        elif a.hi_closed == b.lo_closed:
            who = "both" if a.hi_closed else "neither"
            out.append(Violation("NotPartition", f"breakpoint {fmt(a.hi)} owned by {who} adjacent pieces"))
    for i, p in enumerate(pcs):
        if p.slope == 0:
            out.append(Violation("ZeroSlope", f"piece {i + 1} is constant"))
        elif abs(p.slope) >= 1:
            out.append(Violation("NonContractive", f"piece {i + 1} has |slope| = {fmt(abs(p.slope))} >= 1"))
    partition_ok = not any(v.kind == "NotPartition" for v in out)
    images = []
    for i, p in enumerate(pcs):
        if p.domain.lo > p.domain.hi:
            images.append(None)
            continue
        img = p.domain.affine_image(p.slope, p.intercept) if p.domain.lo < p.domain.hi else None
        images.append(img)
        if img is not None and not is_subset(img, UNIT):
            out.append(Violation("ImageEscapes", f"piece {i + 1} maps onto {img}, not inside [0, 1)"))
    for i in range(len(pcs)):
        for j in range(i + 1, len(pcs)):
            if images[i] is None or images[j] is None:
                continue
            common = intersect(images[i], images[j])
            if common is not None:
                out.append(Violation("NotInjective", f"images of pieces {i + 1} and {j + 1} meet in {common}"))
    if partition_ok:
        for i in range(len(pcs) - 1):
            if pcs[i].left_limit() == pcs[i + 1].right_limit():
                out.append(Violation("NoJump", f"f is continuous at breakpoint {fmt(pcs[i].domain.hi)}"))
    kappa = max(abs(p.slope) for p in pcs)
    report = ValidationReport(not out, kappa if not out else None, out)
    f._report = report
    return report


def ensure_valid(f: PiecewiseAffineContraction) -> PiecewiseAffineContraction:
    report = validate(f)
    if not report.ok:
        raise InvalidMap(report)
    return f


def _check_domain(x):
    if not (ZERO <= x < ONE):
        raise OutOfDomain(f"{fmt(x)} is not in [0, 1)")


def _check_budget(x, max_bits):
    if max_bits is not None and bits(x) > max_bits:
        raise ArithmeticBudgetExceeded(f"rational with {bits(x)} bits exceeds budget of {max_bits}")


# ---------------------------------------------------------------------------
# pointwise dynamics


def evaluate(f: PiecewiseAffineContraction, x) -> mpq:
    x = rational(x)
    _check_domain(x)
    return f.pieces[f.piece_index(x)](x)


def image_interval(f: PiecewiseAffineContraction, J: SidedInterval) -> list[SidedInterval]:
    """Exact image ``f(J)`` as a canonical list of disjoint components."""
    if not is_subset(J, UNIT):
        raise OutOfDomain(f"{J} is not inside [0, 1)")
    parts = []
    for p in f.pieces:
        if p.domain.hi < J.lo or p.domain.lo > J.hi:
            continue
        common = intersect(J, p.domain)
        if common is not None:
            parts.append(common.affine_image(p.slope, p.intercept))
    return union(parts)


def preimage_point(f: PiecewiseAffineContraction, y) -> mpq | None:
    """The unique ``x`` with ``f(x) == y``, or ``None``."""
    y = rational(y)
    _check_domain(y)
    for p in f.pieces:
        x = (y - p.intercept) / p.slope
        if x in p.domain:
            return x
    return None


class OrbitPoints(list):
    """List of orbit points; ``cycle`` is ``(a, b)`` with ``f^a(x) == f^b(x)`` when seen."""

    cycle: tuple[int, int] | None = None


def orbit(f: PiecewiseAffineContraction, x, steps: int, max_bits: int | None = None) -> OrbitPoints:
    """``[x, f(x), ..., f^steps(x)]``, exact, with first exact repetition flagged."""
    x = rational(x)
    _check_domain(x)
    pts = OrbitPoints([x])
    seen = {x: 0}
    for t in range(1, steps + 1):
        x = f.pieces[f.piece_index(x)](x)
        _check_budget(x, max_bits)
        pts.append(x)
        if pts.cycle is None:
            if x in seen:
                pts.cycle = (seen[x], t)
            else:
                seen[x] = t
    return pts


def iterate(f: PiecewiseAffineContraction, x, steps: int) -> mpq:
    for _ in range(steps):
        x = f.pieces[f.piece_index(x)](x)
    return x


def itinerary(f: PiecewiseAffineContraction, x, length: int) -> tuple[int, ...]:
    """Piece labels (1-based) of ``x, f(x), ..., f^{length-1}(x)``."""
    x = rational(x)
    _check_domain(x)
    word = []
    for _ in range(length):
        i = f.piece_index(x)
        word.append(i + 1)
        x = f.pieces[i](x)
    return tuple(word)


# ---------------------------------------------------------------------------
# cylinders


class Cylinder(NamedTuple):
    """Maximal domain on which ``f^k`` is the single affine map ``slope*x + intercept``."""

    support: SidedInterval
    word: tuple[int, ...]
    slope: mpq
    intercept: mpq

    @property
    def depth(self) -> int:
        return len(self.word)

    def fixed_point(self) -> mpq | None:
        """Fixed point of the composed map when it lies in the support."""
        x = self.intercept / (1 - self.slope)
        return x if x in self.support else None


def _first_cylinders(f: PiecewiseAffineContraction) -> list[Cylinder]:
    return [Cylinder(p.domain, (i + 1,), p.slope, p.intercept) for i, p in enumerate(f.pieces)]


def refine(f: PiecewiseAffineContraction, cyls: list[Cylinder], max_bits: int | None = None) -> list[Cylinder]:
    """Depth ``k`` cylinders to depth ``k + 1``."""
    out = []
    pieces = f.pieces
    for c in cyls:
        A, B = c.slope, c.intercept
        img = c.support.affine_image(A, B)
        for i, p in enumerate(pieces):
            d = p.domain
            if d.hi < img.lo or d.lo > img.hi:
                continue
            part = intersect(img, d)
            if part is None:
                continue
            sub = part.affine_preimage(A, B)
            slope = p.slope * A
            intercept = p.slope * B + p.intercept
            if max_bits is not None:
                _check_budget(slope, max_bits)
                _check_budget(intercept, max_bits)
            out.append(Cylinder(sub, c.word + (i + 1,), slope, intercept))
    out.sort(key=lambda c: (c.support.lo, not c.support.lo_closed))
    return out


def iter_cylinders(f: PiecewiseAffineContraction, K: int, max_bits: int | None = None) -> Iterator[tuple[int, list[Cylinder]]]:
    """Yield ``(k, cylinders of depth k)`` for ``k = 1 .. K``."""
    ensure_valid(f)
    cyls = _first_cylinders(f)
    for k in range(1, K + 1):
        if k > 1:
            cyls = refine(f, cyls, max_bits)
        yield k, cyls


def cylinders(f: PiecewiseAffineContraction, k: int, max_bits: int | None = None) -> list[Cylinder]:
    """Exact partition of ``[0, 1)`` into the depth-``k`` cylinders."""
    if k < 1:
        raise ValueError("depth must be at least 1")
    for depth, cyls in iter_cylinders(f, k, max_bits):
        if depth == k:
            return cyls
    raise AssertionError("unreachable")


def path_cylinders(f: PiecewiseAffineContraction, x, K: int) -> list[Cylinder]:
    """The cylinders of depth ``1 .. K`` containing ``x`` (refined along its orbit only)."""
    x = rational(x)
    _check_domain(x)
    i = f.piece_index(x)
    p = f.pieces[i]
    cur = Cylinder(p.domain, (i + 1,), p.slope, p.intercept)
    out = [cur]
    y = p(x)
    for _ in range(1, K):
        i = f.piece_index(y)
        p = f.pieces[i]
        img = cur.support.affine_image(cur.slope, cur.intercept)
        part = intersect(img, p.domain)
        sub = part.affine_preimage(cur.slope, cur.intercept)
        cur = Cylinder(sub, cur.word + (i + 1,), p.slope * cur.slope, p.slope * cur.intercept + p.intercept)
        out.append(cur)
        y = p(y)
    return out


def cylinder_of(f: PiecewiseAffineContraction, x, k: int) -> Cylinder:
    return path_cylinders(f, x, k)[-1]


# ---------------------------------------------------------------------------
# time averages


class PiecewisePolynomial:
    """Observable given by polynomials on consecutive intervals of ``[0, 1]``.

    ``cuts`` are the interior cut points ``c_1 < ... < c_{m-1}``; piece ``j``
    covers ``[c_j, c_{j+1})`` and has coefficients ``coeffs[j]`` in increasing
    degree.
    """

    def __init__(self, cuts, coeffs):
        self.cuts = [rational(c) for c in cuts]
        self.coeffs = [[rational(a) for a in cs] for cs in coeffs]
        if len(self.coeffs) != len(self.cuts) + 1:
            raise ValueError("need one coefficient list per piece")

    @classmethod
    def polynomial(cls, coeffs):
        return cls([], [coeffs])

    def __call__(self, x):
        cs = self.coeffs[bisect_right(self.cuts, x)]
        acc = ZERO
        for a in reversed(cs):
            acc = acc * x + a
        return acc


IDENTITY = PiecewisePolynomial.polynomial([0, 1])


def birkhoff_average(f: PiecewiseAffineContraction, phi: Callable, x, k: int) -> mpq:
    """``(1/k) * sum(phi(f^i(x)) for i < k)``, exact."""
    if k < 1:
        raise ValueError("k must be positive")
    pts = orbit(f, x, k - 1)
    return sum((rational(phi(p)) for p in pts), ZERO) / k


def omega_limit(f: PiecewiseAffineContraction, x, max_steps: int = 2000, K: int = 24) -> list[mpq] | None:
    """Certified periodic omega-limit of ``x`` (orbit in iteration order), or ``None``.

    A step ``t`` certifies convergence to the orbit of ``p`` when some depth-``k``
    cylinder around ``f^t(x)`` has its fixed point ``p`` inside and contains
    an interval around ``p`` that the composed map sends into itself.
    """
    ensure_valid(f)
    y = rational(x)
    _check_domain(y)
    for _ in range(max_steps + 1):
        for c in path_cylinders(f, y, K):
            A, B = c.slope, c.intercept
            p = B / (1 - A)
            if p not in c.support:
                continue
            d = abs(y - p)
            if A > 0:
                seg = SidedInterval(min(p, y), max(p, y), True, True)
            else:
                seg = SidedInterval(p - d, p + d, True, True)
            if is_subset(seg, c.support):
                return list(orbit(f, p, c.depth - 1))
        y = f.pieces[f.piece_index(y)](y)
    return None


def birkhoff_limit(f: PiecewiseAffineContraction, phi: Callable, x, max_steps: int = 2000, K: int = 24) -> mpq | None:
    """Limit of the time average when ``x`` provably converges to a periodic orbit."""
    cycle = omega_limit(f, x, max_steps, K)
    if cycle is None:
        return None
    return sum((rational(phi(p)) for p in cycle), ZERO) / len(cycle)
