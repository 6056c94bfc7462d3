"""Periodic orbits: enumeration, regular/degenerate classification, trapping regions.

Enumeration is complete up to a period bound ``K``: every ``k``-periodic
point is the fixed point of ``f^k`` on the depth-``k`` cylinder that contains
it, so solving ``x = A x + B`` on each cylinder and keeping the solutions
that land in their own support finds all of them.  Nothing is claimed about
periods above ``K``.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum

from gmpy2 import mpq

from .core import (
    Cylinder,
    PiecewiseAffineContraction,
    cylinders,
    ensure_valid,
    image_interval,
    iter_cylinders,
    itinerary,
    orbit,
    preimage_point,
)
from .errors import DegenerateOwner, PreconditionFailed
from .intervals import (
    ONE,
    ZERO,
    SidedInterval,
    fmt,
    intersect,
    is_subset,
    rational,
    union,
)


class Kind(str, Enum):
    REGULAR = "Regular"
    DEGENERATE = "Degenerate"


class Externality(str, Enum):
    INTERNAL = "Internal"
    EXTERNAL = "External"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    seed: str | None = None
    # first step at which each seed side leaves its admissible set
    blocking_steps: tuple[tuple[str, int], ...] = ()


@dataclass
class PeriodicOrbitRecord:
    points: list[mpq]
    period: int
    word: tuple[int, ...]
    kind: Kind
    externality: Externality
    classification: Classification
    region: "TrappingRegion | None" = None

    @property
    def key(self):
        return (self.period, self.points[0])

    def to_json(self) -> dict:
        out = {
            "points": [fmt(p) for p in self.points],
            "period": self.period,
            "word": list(self.word),
            "kind": self.kind.value,
            "externality": self.externality.value,
            "seed": self.classification.seed,
        }
        if self.region is not None:
            out["trapping_region"] = self.region.to_json()
        return out


@dataclass(frozen=True)
class TrappingInterval:
    owner: mpq
    interval: SidedInterval
    period: int
    slope: mpq
    abutment: bool = False

    def to_json(self) -> dict:
        return {
            "owner": fmt(self.owner),
            "interval": str(self.interval),
            "closure": str(self.interval.closure()),
            "abutment": self.abutment,
        }


@dataclass
class TrappingRegion:
    points: list[mpq]
    components: list[TrappingInterval]

    @property
    def intervals(self) -> list[SidedInterval]:
        return [c.interval for c in self.components]

    def sorted_intervals(self) -> list[SidedInterval]:
        return sorted(self.intervals, key=lambda iv: iv.lo)

    def __contains__(self, x) -> bool:
        return any(x in c.interval for c in self.components)

    def to_json(self) -> list:
        return [c.to_json() for c in self.components]


# ---------------------------------------------------------------------------
# enumeration


def _minimal_period(f, x, k) -> int:
    y = x
    for t in range(1, k + 1):
        y = f.pieces[f.piece_index(y)](y)
        if y == x:
            return t
    return 0


def _externality(f, points) -> Externality:
    for p in points:
        if p == ZERO or f.is_breakpoint(p):
            return Externality.EXTERNAL
    return Externality.INTERNAL


def _record(f, points, period) -> PeriodicOrbitRecord:
    i = min(range(period), key=points.__getitem__)
    pts = points[i:] + points[:i]
    cls = classify(f, pts)
    return PeriodicOrbitRecord(
        points=pts,
        period=period,
        word=itinerary(f, pts[0], period),
        kind=cls.kind,
        externality=_externality(f, pts),
        classification=cls,
    )


class CylinderCache:
    """Cylinder partitions by depth, shared by enumeration and trapping solves."""

    def __init__(self, f: PiecewiseAffineContraction, max_bits: int | None = None):
        self.f = f
        self.max_bits = max_bits
        self.by_depth: dict[int, list[Cylinder]] = {}
        self._los: dict[int, list] = {}

    def fill(self, K: int):
        if K in self.by_depth:
            return
        for k, cyls in iter_cylinders(self.f, K, self.max_bits):
            self.by_depth[k] = cyls

    def __getitem__(self, k: int) -> list[Cylinder]:
        if k not in self.by_depth:
            self.fill(k)
        return self.by_depth[k]

    def locate(self, x, k: int) -> int:
        """Index of the depth-``k`` cylinder containing ``x``."""
        cyls = self[k]
        if k not in self._los:
            self._los[k] = [c.support.lo for c in cyls]
        los = self._los[k]
        i = bisect_right(los, x) - 1
        while i >= 0 and x not in cyls[i].support:
            i -= 1
        if i < 0 or x not in cyls[i].support:
            i = bisect_right(los, x)
            if i >= len(cyls) or x not in cyls[i].support:
                raise AssertionError(f"no depth-{k} cylinder contains {fmt(x)}")
        return i


def enumerate_periodic_orbits(f: PiecewiseAffineContraction, K: int, cache: CylinderCache | None = None) -> list[PeriodicOrbitRecord]:
    """All periodic orbits of period at most ``K``, keyed by (period, least point)."""
    if K < 1:
        raise ValueError("K must be at least 1")
    ensure_valid(f)
    if cache is None:
        cache = CylinderCache(f)
    cache.fill(K)
    seen: set = set()
    found = []
    for k in range(1, K + 1):
        for c in cache[k]:
            x = c.fixed_point()
            if x is None or x in seen:
                continue
            if _minimal_period(f, x, k) != k:
                continue
            pts = list(orbit(f, x, k - 1))
            seen.update(pts)
            found.append(_record(f, pts, k))
    found.sort(key=lambda r: r.key)
    return found


# ---------------------------------------------------------------------------
# classification


def admissible_sides(f: PiecewiseAffineContraction, q) -> frozenset:
    """Sides ``L``/``R`` from which a small one-sided germ at ``q`` stays in one piece."""
    if q == ZERO:
        return frozenset("R")
    i = bisect_right(f._cuts, q)
    if i and f._cuts[i - 1] == q:
        return frozenset("L") if f._owner_left[i - 1] else frozenset("R")
    return frozenset("LR")


def classify(f: PiecewiseAffineContraction, points) -> Classification:
    """Regular or degenerate, by propagating a one-sided germ around the orbit."""
    if isinstance(points, PeriodicOrbitRecord):
        points = points.points
    pts = [rational(p) for p in points]
    k = len(pts)
    if all(p != ZERO and not f.is_breakpoint(p) for p in pts):
        return Classification(Kind.REGULAR, None, ())
    blocked = []
    for seed in "LR":
        side = seed
        ok = True
        for step in range(2 * k):
            q = pts[step % k]
            if side not in admissible_sides(f, q):
                blocked.append((seed, step))
                ok = False
                break
            if f.piece_of(q).slope < 0:
                side = "L" if side == "R" else "R"
        if ok:
            return Classification(Kind.REGULAR, seed, tuple(blocked))
    return Classification(Kind.DEGENERATE, None, tuple(blocked))


def germ_oracle(f: PiecewiseAffineContraction, points, delta=None) -> dict:
    """Brute-force regularity check on explicit germs.

    Iterates ``(p-d, p]``, ``[p, p+d)`` and ``(p-d, p+d)`` through ``image_interval``
    for twice the period and records whether every iterate stays a single
    interval.  ``d`` defaults to a quarter of the smallest gap between the
    orbit points, the breakpoints and 1.
    """
    pts = [rational(p) for p in points]
    p = pts[0]
    k = len(pts)
    if delta is None:
        marks = sorted(set(f.breakpoints) | set(pts))
        gaps = [b - a for a, b in zip(marks, marks[1:])]
        delta = min(gaps) / 4
    germs = {}
    if p - delta >= 0:
        germs["left"] = SidedInterval(p - delta, p, False, True)
        germs["both"] = SidedInterval(p - delta, p + delta, False, False)
    germs["right"] = SidedInterval(p, p + delta, True, False)
    result = {}
    for name, J in germs.items():
        parts = [J]
        ok = True
        for _ in range(2 * k):
            parts = image_interval(f, parts[0])
            if len(parts) != 1:
                ok = False
                break
        result[name] = ok
    return result


# ---------------------------------------------------------------------------
# trapping intervals


def is_trapping_interval(f: PiecewiseAffineContraction, J: SidedInterval, p, k: int) -> bool:
    """Literal check: ``p`` in ``J`` and ``f(J), ..., f^k(J)`` intervals with ``f^k(J)`` inside ``J``."""
    if J.is_point or p not in J or not is_subset(J, SidedInterval(ZERO, ONE, True, False)):
        return False
    cur = J
    for _ in range(k):
        parts = image_interval(f, cur)
        if len(parts) != 1 or parts[0].is_point:
            return False
        cur = parts[0]
    return is_subset(cur, J)


def _box(C: Cylinder, p) -> SidedInterval:
    """Largest interval around ``p`` inside ``C`` mapped into itself by the composed map."""
    A = C.slope
    S = C.support
    if A > 0:
        return S
    U, V = p - S.lo, S.hi - p
    a = abs(A)
    u = min(U, V / a)
    v = min(V, U / a)
    lo, hi = p - u, p + v
    lc = lo > S.lo or S.lo_closed
    hc = hi < S.hi or S.hi_closed
    # f^k swaps the ends; a closed end may only land on a closed end
    if a * u == v and lc and not hc:
        lc = False
    if a * v == u and hc and not lc:
        hc = False
    return SidedInterval(lo, hi, lc, hc)


def maximal_trapping_interval(
    f: PiecewiseAffineContraction,
    p,
    period: int,
    cache: CylinderCache | None = None,
    check_regular: bool = True,
) -> TrappingInterval:
    """Largest interval around ``p`` whose first ``period`` iterates each stay in one piece
    and whose ``period``-th iterate falls back inside it."""
    p = rational(p)
    ensure_valid(f)
    if cache is None:
        cache = CylinderCache(f)
    if check_regular:
        pts = list(orbit(f, p, period - 1))
        if classify(f, pts).kind is Kind.DEGENERATE:
            raise DegenerateOwner(f"{fmt(p)} is a degenerate periodic point")
    cyls = cache[period]
    i = cache.locate(p, period)
    C = cyls[i]
    J = _box(C, p)
    if J.is_point or J.lo == J.hi:
        raise DegenerateOwner(f"no trapping interval around {fmt(p)}")
    abut = _abutment(f, J, C, p, period, cyls, i)
    return TrappingInterval(p, J, period, C.slope, abut)


def _abutment(f, J, C, p, k, cyls, i) -> bool:
    """Whether ``J`` can be pushed across a cylinder wall and still trap in the literal sense."""
    S = C.support
    if J.hi == S.hi and i + 1 < len(cyls):
        N = cyls[i + 1].support
        ext = SidedInterval(J.lo, N.hi, J.lo_closed, N.hi_closed)
        if is_trapping_interval(f, ext, p, k):
            return True
    if J.lo == S.lo and i > 0:
        N = cyls[i - 1].support
        ext = SidedInterval(N.lo, J.hi, N.lo_closed, J.hi_closed)
        if is_trapping_interval(f, ext, p, k):
            return True
    return False


def trapping_region(f: PiecewiseAffineContraction, rec: PeriodicOrbitRecord, cache: CylinderCache | None = None) -> TrappingRegion:
    """Union of the maximal trapping intervals over the orbit, checked for invariance and disjointness."""
    if rec.kind is Kind.DEGENERATE:
        raise DegenerateOwner(f"orbit of {fmt(rec.points[0])} is degenerate")
    if cache is None:
        cache = CylinderCache(f)
    comps = [maximal_trapping_interval(f, q, rec.period, cache, check_regular=False) for q in rec.points]
    region = TrappingRegion(list(rec.points), comps)
    ivs = region.sorted_intervals()
    for a, b in zip(ivs, ivs[1:]):
        if intersect(a, b) is not None:
            raise AssertionError(f"trapping intervals {a} and {b} overlap")
    k = rec.period
    for j, c in enumerate(comps):
        img = image_interval(f, c.interval)
        target = comps[(j + 1) % k].interval
        if len(img) != 1 or not is_subset(img[0], target):
            raise AssertionError(f"f({c.interval}) is not inside {target}")
    rec.region = region
    return region


# ---------------------------------------------------------------------------
# verdicts


@dataclass
class ConvergenceEvidence:
    seeds: int
    converged: int
    max_steps: int
    stragglers: list[mpq] = field(default_factory=list)

    @property
    def fraction(self) -> float:
        return self.converged / self.seeds if self.seeds else 1.0

    def to_json(self) -> dict:
        return {
            "seeds": self.seeds,
            "converged": self.converged,
            "max_steps": self.max_steps,
            "stragglers": [fmt(x) for x in self.stragglers[:10]],
        }


@dataclass
class CensusVerdict:
    m: int
    d: int
    n: int
    K: int
    orbits: list[PeriodicOrbitRecord]
    evidence: ConvergenceEvidence | None = None

    @property
    def bound_ok(self) -> bool:
        return self.m + self.d <= self.n

    @property
    def regular_bound_ok(self) -> bool:
        return self.m <= self.n

    @property
    def tight(self) -> bool:
        return self.m + self.d == self.n

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "d": self.d,
            "n": self.n,
            "max_period": self.K,
            "bound_ok": self.bound_ok,
            "tight": self.tight,
            "periods_above_K_certified_absent": False,
            "asymptotic_periodicity_evidence": self.evidence.to_json() if self.evidence else None,
        }


TOLERANCE = mpq(1, 10**12)


def convergence_evidence(
    f: PiecewiseAffineContraction,
    orbits: list[PeriodicOrbitRecord],
    seeds: int = 1000,
    max_steps: int = 2000,
    tol=TOLERANCE,
) -> ConvergenceEvidence:
    """Iterate the grid ``i/seeds`` and count seeds that provably end within ``tol`` of an orbit.

    Once an iterate enters a trapping interval ``J`` of a regular orbit with
    composed slope ``A``, its distance to the orbit after ``j`` more periods is
    at most ``|A|^j`` times the current one, so the remaining steps needed are
    computed instead of iterated.  Seeds landing exactly on a periodic point
    count as converged.
    """
    comps = []
    periodic = set()
    for rec in orbits:
        periodic.update(rec.points)
        if rec.region is not None:
            for c in rec.region.components:
                comps.append((c.interval, c.owner, abs(c.slope), rec.period))
    comps.sort(key=lambda t: t[0].lo)
    los = [c[0].lo for c in comps]
    conv = 0
    strag = []
    for i in range(seeds):
        x = mpq(i, seeds)
        ok = False
        for t in range(max_steps + 1):
            if x in periodic:
                ok = True
                break
            j = bisect_right(los, x) - 1
            if j >= 0 and x in comps[j][0]:
                J, q, a, k = comps[j]
                dist = abs(x - q)
                steps = t
                while dist >= tol and steps <= max_steps:
                    dist *= a
                    steps += k
                ok = steps <= max_steps
                break
            if t < max_steps:
                x = f.pieces[f.piece_index(x)](x)
        if not ok:
            dists = [abs(x - p) for p in periodic]
            ok = bool(dists) and min(dists) < tol
        if ok:
            conv += 1
        else:
            strag.append(mpq(i, seeds))
    return ConvergenceEvidence(seeds, conv, max_steps, strag)


def census_verdict(
    f: PiecewiseAffineContraction,
    K: int,
    evidence: bool = True,
    seeds: int = 1000,
    max_steps: int = 2000,
    cache: CylinderCache | None = None,
    orbits: list[PeriodicOrbitRecord] | None = None,
) -> CensusVerdict:
    """Count regular and degenerate orbits up to period ``K`` and, when the count
    reaches ``n``, gather sampled evidence of asymptotic periodicity."""
    if cache is None:
        cache = CylinderCache(f)
    if orbits is None:
        orbits = enumerate_periodic_orbits(f, K, cache)
    for rec in orbits:
        if rec.kind is Kind.REGULAR and rec.region is None:
            trapping_region(f, rec, cache)
    m = sum(r.kind is Kind.REGULAR for r in orbits)
    d = len(orbits) - m
    v = CensusVerdict(m, d, f.n, K, orbits)
    if evidence and v.tight:
        v.evidence = convergence_evidence(f, orbits, seeds, max_steps)
    return v


def regions_disjoint(orbits: list[PeriodicOrbitRecord]) -> bool:
    ivs = []
    for rec in orbits:
        if rec.region is not None:
            ivs.extend(rec.region.intervals)
    ivs.sort(key=lambda iv: (iv.lo, not iv.lo_closed))
    return all(intersect(a, b) is None for a, b in zip(ivs, ivs[1:]))


# ---------------------------------------------------------------------------
# piecewise increasing maps with left-closed pieces


@dataclass(frozen=True)
class IncreasingOrbit:
    record: PeriodicOrbitRecord
    epsilon: mpq
    interval: SidedInterval
    alpha: mpq
    alpha_index: int


def _check_increasing(f):
    ensure_valid(f)
    for i, p in enumerate(f.pieces):
        if p.slope <= 0:
            raise PreconditionFailed(f"piece {i + 1} is not increasing")
        if not p.domain.lo_closed or p.domain.hi_closed:
            raise PreconditionFailed(f"piece {i + 1} is not of the form [a, b)")


def _germ_limit(f, y, K, max_steps):
    """Periodic orbit attracting the left germ of ``y``, or ``None`` within the budget.

    The germ ``(y - d, y)`` is followed through left limits.  At each step the
    composed map along the germ's next ``k`` symbols is solved for its fixed
    point ``q``; if ``[q, y)`` stays inside single pieces for those ``k`` steps,
    ``f^k`` maps it into itself and the germ is attracted to the orbit of ``q``.
    """
    pieces = f.pieces
    for _ in range(max_steps):
        A, B = ONE, ZERO
        z = y
        for k in range(1, K + 1):
            i = f.side_piece(z, "L")
            pc = pieces[i]
            A, B = pc.slope * A, pc.slope * B + pc.intercept
            z = pc(z)
            q = B / (1 - A)
            if not (ZERO <= q < y):
                continue
            lo, hi = q, y
            good = True
            for _ in range(k):
                j = f.side_piece(hi, "L")
                if f.piece_index(lo) != j:
                    good = False
                    break
                lo, hi = pieces[j](lo), pieces[j](hi)
            if good and lo == q:
                return q, k
        y = pieces[f.side_piece(y, "L")](y)
    return None


def appendix_a_census(f: PiecewiseAffineContraction, K: int = 24, max_steps: int = 200) -> list[IncreasingOrbit]:
    """Orbits of a piecewise increasing map with pieces ``[x_{i-1}, x_i)``, found from breakpoint germs.

    Every periodic orbit attracts the left germ of some ``x_i`` (``x_n = 1``
    included), so following those ``n`` germs finds all of them without any
    cylinder enumeration.  For each orbit the least point ``p`` gets
    ``J_p = [p, eps(p))`` and the breakpoint ``alpha`` reached from ``eps(p)``.
    """
    _check_increasing(f)
    xs = f.breakpoints
    found: dict = {}
    for y in xs[1:]:
        hit = _germ_limit(f, y, K, max_steps)
        if hit is None:
            continue
        q, k = hit
        per = _minimal_period(f, q, k)
        pts = list(orbit(f, q, per - 1))
        least = min(pts)
        if least not in found:
            found[least] = _record(f, pts, per)
    out = []
    used = {}
    for rec in sorted(found.values(), key=lambda r: r.key):
        p = rec.points[0]
        eps, a_idx = _epsilon(f, p, rec.period)
        if a_idx in used:
            raise AssertionError(f"alpha not injective: x_{a_idx} assigned twice")
        used[a_idx] = rec
        out.append(IncreasingOrbit(rec, eps, SidedInterval(p, eps, True, False), xs[a_idx], a_idx))
    return out


def _epsilon(f, p, k):
    """``eps(p)`` and the index ``i`` of the breakpoint ``x_i`` it is sent to."""
    best, best_i = ONE, f.n
    xs = f.breakpoints
    for i in range(1, f.n):
        y = xs[i]
        for _ in range(k):
            if p < y < best:
                best, best_i = y, i
            y = preimage_point(f, y)
            if y is None:
                break
    return best, best_i
