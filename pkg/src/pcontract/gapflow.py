"""Gaps of the image, their forward layers, and the basins they build.

``E`` is the interior of ``[0, 1) \\ f([0, 1))``.  Removing the finitely many
points of ``E`` that eventually land on a breakpoint (``B``) leaves open gap
intervals ``F_1 .. F_r``; their forward images ``f^l(F_j)`` are open
intervals that never meet a breakpoint, are pairwise disjoint, and tile
``[0, 1)`` up to a set of measure at most ``kappa^(L+1)`` after ``L`` steps.

Each layer is either inside a trapping region or disjoint from it, so the
interior of a basin is the interior of the trapping region plus the layers
seen before capture.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

from gmpy2 import mpq

from .census import Kind, PeriodicOrbitRecord, TrappingRegion
from .core import PiecewiseAffineContraction, ensure_valid, preimage_point
from .errors import ArithmeticBudgetExceeded, BetaHitNotFound, LayerHitBreakpoint
from .intervals import (
    ONE,
    ZERO,
    SidedInterval,
    bits,
    boundary_points,
    closure,
    complement,
    fmt,
    interior,
    intersect,
    is_subset,
    measure,
    set_contains,
    union,
)


@dataclass(frozen=True)
class Layer:
    """``f^ell(F_gap)``, with ``f^ell = slope*x + intercept`` on ``F_gap``."""

    gap: int
    ell: int
    interval: SidedInterval
    slope: mpq
    intercept: mpq


@dataclass
class GapAtlas:
    E: list[SidedInterval]
    B: list[mpq]
    F: list[SidedInterval]
    kappa: mpq
    layers: list[list[Layer]] = field(default_factory=list)
    chain_truncated: bool = False

    @property
    def r(self) -> int:
        return len(self.F)

    @property
    def depth(self) -> int:
        return min((len(ls) - 1 for ls in self.layers), default=-1)

    def all_layers(self) -> list[Layer]:
        return [ly for ls in self.layers for ly in ls]

    def uncovered_bound(self, L: int | None = None) -> mpq:
        return self.kappa ** ((self.depth if L is None else L) + 1)

    def covered_length(self, L: int | None = None) -> mpq:
        L = self.depth if L is None else L
        return sum((ly.interval.length for ls in self.layers for ly in ls[: L + 1]), ZERO)

    def to_json(self) -> dict:
        return {
            "E": [str(iv) for iv in self.E],
            "B": [fmt(b) for b in self.B],
            "F": [str(iv) for iv in self.F],
            "r": self.r,
            "depth": self.depth,
            "covered_length_lower": fmt(self.covered_length()),
            "uncovered_bound": fmt(self.uncovered_bound()),
        }


def compute_E(f: PiecewiseAffineContraction) -> list[SidedInterval]:
    ensure_valid(f)
    image = union(p.image() for p in f.pieces)
    return interior(complement(image))


def compute_B(f: PiecewiseAffineContraction, E: list[SidedInterval], max_steps: int = 5000, max_bits: int | None = None):
    """Points of ``E`` sent onto a breakpoint by some iterate, by walking preimage chains.

    Returns ``(B, truncated)`` where ``truncated`` says some chain ran out of
    budget without ending or cycling.
    """
    out = set()
    truncated = False
    for x in f.interior_breakpoints:
        y = x
        seen = {y}
        for _ in range(max_steps):
            if set_contains(E, y):
                out.add(y)
            y = preimage_point(f, y)
            if y is None or y in seen:
                break
            if max_bits is not None and bits(y) > max_bits:
                raise ArithmeticBudgetExceeded(f"backward chain of {fmt(x)} exceeds {max_bits} bits")
            seen.add(y)
        else:
            truncated = True
    return sorted(out), truncated


def compute_F(f: PiecewiseAffineContraction, max_steps: int = 5000) -> GapAtlas:
    E = compute_E(f)
    B, truncated = compute_B(f, E, max_steps)
    F = []
    for comp in E:
        cuts = [b for b in B if b in comp]
        lo = comp.lo
        for b in cuts + [comp.hi]:
            F.append(SidedInterval(lo, b, False, False))
            lo = b
    return GapAtlas(E, B, F, f.kappa, [], truncated)


def _step(f, ly: Layer) -> Layer:
    I = ly.interval
    i = bisect_right(f._cuts, I.lo)
    if i < len(f._cuts) and f._cuts[i] < I.hi:
        raise LayerHitBreakpoint(f"layer {I} of gap {ly.gap + 1} contains breakpoint {fmt(f._cuts[i])}")
    p = f.pieces[i]
    return Layer(ly.gap, ly.ell + 1, I.affine_image(p.slope, p.intercept), p.slope * ly.slope, p.slope * ly.intercept + p.intercept)


def propagate(f: PiecewiseAffineContraction, atlas: GapAtlas, L: int, gaps=None) -> GapAtlas:
    """Fill (or extend) the layers ``f^l(F_j)`` for ``l <= L``."""
    if not atlas.layers:
        atlas.layers = [[Layer(j, 0, F, ONE, ZERO)] for j, F in enumerate(atlas.F)]
    for j in range(atlas.r) if gaps is None else gaps:
        ls = atlas.layers[j]
        while ls[-1].ell < L:
            ls.append(_step(f, ls[-1]))
    return atlas


def gap_atlas(f: PiecewiseAffineContraction, L: int = 60) -> GapAtlas:
    return propagate(f, compute_F(f), L)


# ---------------------------------------------------------------------------
# structural checks


@dataclass
class AtlasChecks:
    E_components_ok: bool
    E_length_ok: bool
    gap_returns_disjoint: bool
    B_bound_ok: bool
    r_bound_ok: bool
    layers_disjoint: bool
    leftover_ok: bool

    @property
    def ok(self) -> bool:
        return all(vars(self).values())

    def failures(self) -> list[str]:
        return [k for k, v in vars(self).items() if not v]


def layers_disjoint(atlas: GapAtlas, L: int | None = None) -> bool:
    L = atlas.depth if L is None else L
    ivs = sorted((ly.interval for ls in atlas.layers for ly in ls[: L + 1]), key=lambda iv: iv.lo)
    return all(a.hi <= b.lo for a, b in zip(ivs, ivs[1:]))


def gap_returns_disjoint(f: PiecewiseAffineContraction, atlas: GapAtlas, L: int | None = None) -> bool:
    """``E`` and ``f^l(E)`` are disjoint for ``1 <= l <= L``."""
    L = atlas.depth if L is None else L
    E = atlas.E
    los = [e.lo for e in E]

    def hits(iv):
        i = bisect_right(los, iv.lo) - 1
        for k in (i, i + 1):
            if 0 <= k < len(E) and intersect(E[k], iv) is not None:
                return True
        return False

    for ls in atlas.layers:
        for ly in ls[1 : L + 1]:
            if hits(ly.interval):
                return False
    for b in atlas.B:
        y = b
        for _ in range(L):
            y = f.pieces[f.piece_index(y)](y)
            if set_contains(E, y):
                return False
    return True


def check_atlas(f: PiecewiseAffineContraction, atlas: GapAtlas, L: int | None = None) -> AtlasChecks:
    L = atlas.depth if L is None else L
    n = f.n
    return AtlasChecks(
        E_components_ok=len(atlas.E) <= n + 1,
        E_length_ok=measure(atlas.E) >= 1 - f.kappa,
        gap_returns_disjoint=gap_returns_disjoint(f, atlas, L),
        B_bound_ok=len(atlas.B) <= n - 1,
        r_bound_ok=atlas.r <= 2 * n,
        layers_disjoint=layers_disjoint(atlas, L),
        leftover_ok=1 - atlas.covered_length(L) <= f.kappa ** (L + 1),
    )


# ---------------------------------------------------------------------------
# capture


class _Region:
    """Sorted canonical union of one orbit's trapping region, for fast containment tests."""

    def __init__(self, region: TrappingRegion):
        self.parts = union(region.intervals)
        self.los = [iv.lo for iv in self.parts]

    def classify(self, iv: SidedInterval) -> str:
        """``"inside"``, ``"outside"`` or ``"partial"``."""
        i = bisect_right(self.los, iv.lo) - 1
        for k in (i, i + 1):
            if 0 <= k < len(self.parts):
                part = self.parts[k]
                if is_subset(iv, part):
                    return "inside"
                if intersect(iv, part) is not None:
                    return "partial"
        return "outside"


@dataclass
class CaptureRecord:
    gap_index: int
    orbit_index: int | None
    target_time: int | None
    depth: int
    dichotomy_ok: bool = True

    def to_json(self) -> dict:
        return {
            "gap": self.gap_index + 1,
            "orbit": None if self.orbit_index is None else self.orbit_index + 1,
            "target_time": "inf" if self.target_time is None else self.target_time,
            "depth": self.depth,
            "dichotomy_ok": self.dichotomy_ok,
        }


def target_time(atlas: GapAtlas, j: int, region: TrappingRegion) -> tuple[int | None, bool]:
    """First ``l`` with ``f^l(F_j)`` inside the region (``None`` if not seen) and whether
    every earlier layer was disjoint from it."""
    R = _Region(region)
    for ly in atlas.layers[j]:
        where = R.classify(ly.interval)
        if where == "inside":
            return ly.ell, True
        if where == "partial":
            return None, False
    return None, True


def target_times(
    f: PiecewiseAffineContraction,
    atlas: GapAtlas,
    regions: list[TrappingRegion],
    max_depth: int | None = None,
) -> list[CaptureRecord]:
    """Capturing orbit and target time of every gap.

    Gaps still free at the atlas depth are propagated further, doubling the
    depth up to ``max_depth``, before being reported as uncaptured.
    """
    Rs = [_Region(r) for r in regions]
    out = []
    for j in range(atlas.r):
        rec = None
        start = 0
        while rec is None:
            ls = atlas.layers[j]
            for ly in ls[start:]:
                for o, R in enumerate(Rs):
                    where = R.classify(ly.interval)
                    if where == "inside":
                        rec = CaptureRecord(j, o, ly.ell, ls[-1].ell)
                        break
                    if where == "partial":
                        rec = CaptureRecord(j, o, None, ls[-1].ell, dichotomy_ok=False)
                        break
                if rec is not None:
                    break
            if rec is not None:
                break
            depth = ls[-1].ell
            if max_depth is None or depth >= max_depth or not Rs:
                rec = CaptureRecord(j, None, None, depth)
                break
            start = len(ls)
            propagate(f, atlas, min(max_depth, 2 * depth + 1), gaps=[j])
        out.append(rec)
    return out


@dataclass
class StableManifoldRecord:
    orbit_index: int
    open_intervals: list[SidedInterval]
    uncovered_bound: mpq

    def to_json(self) -> dict:
        return {
            "orbit": self.orbit_index + 1,
            "open_intervals": [str(iv) for iv in self.open_intervals],
            "uncovered_bound": fmt(self.uncovered_bound),
        }


def stable_manifold_interior(
    f: PiecewiseAffineContraction,
    atlas: GapAtlas,
    region: TrappingRegion,
    captures: list[CaptureRecord],
    orbit_index: int,
) -> StableManifoldRecord:
    """Interior of the trapping region together with every layer seen before its capture."""
    parts = list(region.intervals)
    for c in captures:
        if c.orbit_index == orbit_index and c.target_time is not None:
            parts.extend(ly.interval for ly in atlas.layers[c.gap_index][: c.target_time])
    return StableManifoldRecord(orbit_index, interior(parts), atlas.uncovered_bound())


# ---------------------------------------------------------------------------
# decomposition


@dataclass
class BetaEntry:
    index: int  # 0-based into the W list; the residual, when present, is last
    inf: mpq
    q: int
    value: mpq

    def to_json(self) -> dict:
        return {"W": self.index + 1, "inf": fmt(self.inf), "q": self.q, "beta": fmt(self.value)}


@dataclass
class HarvestedChain:
    orbit_index: int
    pairs: list[tuple[int, int]]
    contains_zero: bool
    is_chain: bool
    size: int

    @property
    def ok(self) -> bool:
        s = len(self.pairs)
        bound = s - 1 if self.contains_zero else s
        return self.is_chain and self.size <= bound

    def to_json(self) -> dict:
        return {
            "orbit": self.orbit_index + 1,
            "pairs": [list(p) for p in self.pairs],
            "coordinate_count": self.size,
            "contains_zero": self.contains_zero,
            "is_chain": self.is_chain,
            "ok": self.ok,
        }


@dataclass
class Decomposition:
    W: list[list[SidedInterval]]
    residual: list[SidedInterval]
    residual_status: str  # "empty" or "inconclusive"
    beta: list[BetaEntry]
    beta_injective: bool
    degenerate_on_boundaries: bool | None
    forward_invariant: bool
    chains: list[HarvestedChain]

    @property
    def beta_image(self) -> set:
        return {b.value for b in self.beta}

    def to_json(self) -> dict:
        return {
            "W": [[str(iv) for iv in w] for w in self.W],
            "residual": [str(iv) for iv in self.residual],
            "residual_status": self.residual_status,
            "beta": [b.to_json() for b in self.beta],
            "beta_injective": self.beta_injective,
            "beta_image_size": len(self.beta_image),
            "degenerate_points_on_boundaries": self.degenerate_on_boundaries,
            "forward_invariance_sampled": self.forward_invariant,
            "harvested_chains": [c.to_json() for c in self.chains],
        }


def beta_of(f: PiecewiseAffineContraction, W: list[SidedInterval], index: int, max_steps: int = 10000) -> BetaEntry:
    y = min(iv.lo for iv in W)
    if y == ZERO:
        return BetaEntry(index, y, 0, ZERO)
    z = y
    for q in range(max_steps + 1):
        if f.is_breakpoint(z):
            return BetaEntry(index, y, q, z)
        z = f.pieces[f.piece_index(z)](z)
    raise BetaHitNotFound(f"orbit of inf W = {fmt(y)} met no breakpoint in {max_steps} steps")


def forward_invariance_sampled(f: PiecewiseAffineContraction, W: list[SidedInterval], samples: int = 512) -> bool:
    """``f(x)`` lies in the closure of ``W`` for ``samples`` points spread over ``W``."""
    if not W:
        return True
    cl = closure(W)
    per = -(-samples // len(W))
    for iv in W:
        for i in range(1, per + 1):
            x = iv.lo + iv.length * mpq(i, per + 1)
            if not set_contains(cl, f.pieces[f.piece_index(x)](x)):
                return False
    return True


def _germ_owner(Ws, z, side) -> int | None:
    """Index of the set whose closure contains the one-sided germ of ``z``."""
    for j, W in enumerate(Ws):
        for iv in W:
            if side == "R" and iv.lo <= z < iv.hi:
                return j
            if side == "L" and iv.lo < z <= iv.hi:
                return j
    return None


def harvest_chain(f: PiecewiseAffineContraction, rec: PeriodicOrbitRecord, Ws, orbit_index: int) -> HarvestedChain | None:
    """Pairs ``(a, b)`` of neighbouring basins at the breakpoint visits of a degenerate orbit."""
    from .chains import coordinate_set, is_chain

    pairs = []
    for z in rec.points:
        if not (z == ZERO or f.is_breakpoint(z)):
            continue
        own = "R" if z == ZERO or f.piece_of(z).domain.lo == z else "L"
        a = _germ_owner(Ws, z, own)
        if a is None:
            return None
        if z == ZERO:
            b = a
        else:
            b = _germ_owner(Ws, z, "L" if own == "R" else "R")
            if b is None:
                return None
        pairs.append((a + 1, b + 1))
    if not pairs:
        return None
    return HarvestedChain(orbit_index, pairs, ZERO in rec.points, is_chain(pairs), len(coordinate_set(pairs)))


def decompose_and_beta(
    f: PiecewiseAffineContraction,
    manifolds: list[StableManifoldRecord],
    captures: list[CaptureRecord],
    orbits: list[PeriodicOrbitRecord] = (),
    invariance_samples: int = 512,
) -> Decomposition:
    """Basins, residual set, the breakpoint assignment and the degenerate-orbit checks.

    The residual is certified empty when every gap was captured: the basins
    then contain every layer, which together cover ``[0, 1)`` up to a null set.
    Otherwise it is the complement of the truncated basins and only marked
    inconclusive, since later captures could still fill it.
    """
    Ws = [m.open_intervals for m in manifolds]
    all_captured = all(c.target_time is not None for c in captures)
    if all_captured:
        residual, status = [], "empty"
    else:
        residual = interior(complement(closure([iv for W in Ws for iv in W])))
        status = "inconclusive"
    beta = [beta_of(f, W, i) for i, W in enumerate(Ws) if W]
    values = [b.value for b in beta]
    injective = len(set(values)) == len(values)
    invariant = all(forward_invariance_sampled(f, W, invariance_samples) for W in Ws)

    degenerate = [(i, r) for i, r in enumerate(orbits) if r.kind is Kind.DEGENERATE]
    on_boundaries = None
    chains = []
    if status == "empty":
        bounds = set()
        for W in Ws:
            bounds.update(boundary_points(W))
        on_boundaries = all(p in bounds for _, r in degenerate for p in r.points)
        for i, r in degenerate:
            ch = harvest_chain(f, r, Ws, i)
            if ch is not None:
                chains.append(ch)
    return Decomposition(Ws, residual, status, beta, injective, on_boundaries, invariant, chains)
