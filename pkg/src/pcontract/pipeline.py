"""End-to-end analysis of one map: orbits, gaps, basins and the counting verdicts."""

from __future__ import annotations

from dataclasses import dataclass

from .census import (
    CensusVerdict,
    CylinderCache,
    Kind,
    census_verdict,
    regions_disjoint,
)
from .core import PiecewiseAffineContraction, ensure_valid
from .gapflow import (
    AtlasChecks,
    CaptureRecord,
    Decomposition,
    GapAtlas,
    StableManifoldRecord,
    check_atlas,
    compute_F,
    decompose_and_beta,
    propagate,
    stable_manifold_interior,
    target_times,
)
from .intervals import intersect_sets


@dataclass
class Analysis:
    f: PiecewiseAffineContraction
    verdict: CensusVerdict
    atlas: GapAtlas
    atlas_checks: AtlasChecks
    captures: list[CaptureRecord]
    manifolds: list[StableManifoldRecord]
    decomposition: Decomposition
    regions_disjoint: bool
    manifolds_disjoint: bool

    @property
    def regular(self):
        return [r for r in self.verdict.orbits if r.kind is Kind.REGULAR]

    @property
    def residual_verdict(self) -> str:
        """``"ok"``, ``"violation"`` or ``"inconclusive"`` for the residual-set refinement of the bound.

        With a certified empty residual only ``m + d <= n`` is required.  An
        uncertified residual would demand ``m + d <= n - 1``; if that fails the
        result is inconclusive rather than a violation, since the residual may
        vanish at larger depth.
        """
        v = self.verdict
        if self.decomposition.residual_status == "empty":
            return "ok" if v.m + v.d <= v.n else "violation"
        if v.m + v.d <= v.n - 1:
            return "ok"
        return "inconclusive"

    @property
    def beta_ok(self) -> bool:
        dec = self.decomposition
        return dec.beta_injective and len(dec.beta_image) <= self.f.n - self.verdict.d

    @property
    def violations(self) -> list[str]:
        """Every checked statement that failed."""
        out = []
        v = self.verdict
        if not v.bound_ok:
            out.append("orbit count exceeds n")
        if not v.regular_bound_ok:
            out.append("regular orbit count exceeds n")
        if self.residual_verdict == "violation":
            out.append("orbit count exceeds n - 1 with non-empty residual")
        out.extend(f"gap structure: {k}" for k in self.atlas_checks.failures())
        if not all(c.dichotomy_ok for c in self.captures):
            out.append("a layer partially overlaps a trapping region")
        if not self.regions_disjoint:
            out.append("trapping regions overlap")
        if not self.manifolds_disjoint:
            out.append("basin interiors overlap")
        captured = {c.orbit_index for c in self.captures if c.target_time is not None}
        if self.decomposition.residual_status == "empty" and len(captured) != len(self.regular):
            out.append("a regular orbit captures no gap")
        if not self.beta_ok:
            out.append("breakpoint assignment not injective or too large")
        if self.decomposition.degenerate_on_boundaries is False:
            out.append("degenerate orbit point off the basin boundaries")
        if not self.decomposition.forward_invariant:
            out.append("basin not forward invariant on samples")
        if any(not c.ok for c in self.decomposition.chains):
            out.append("harvested chain breaks the coordinate bound")
        if v.tight and v.evidence is not None and v.evidence.converged != v.evidence.seeds:
            out.append("tight map with non-convergent grid seeds")
        return out

    @property
    def inconclusive(self) -> bool:
        return self.residual_verdict == "inconclusive"

    def to_json(self) -> dict:
        return {
            "map": self.f.name,
            "n": self.f.n,
            "verdict": self.verdict.to_json(),
            "orbits": [r.to_json() for r in self.verdict.orbits],
            "atlas": self.atlas.to_json(),
            "atlas_checks": {k: v for k, v in vars(self.atlas_checks).items()},
            "captures": [c.to_json() for c in self.captures],
            "manifolds": [m.to_json() for m in self.manifolds],
            "decomposition": self.decomposition.to_json(),
            "residual_verdict": self.residual_verdict,
            "violations": self.violations,
        }


def analyze(
    f: PiecewiseAffineContraction,
    K: int = 24,
    L: int = 60,
    max_depth: int = 480,
    evidence: bool = True,
    seeds: int = 1000,
    max_steps: int = 2000,
) -> Analysis:
    """Run the whole chain on ``f`` with period bound ``K`` and layer depth ``L``."""
    ensure_valid(f)
    cache = CylinderCache(f)
    verdict = census_verdict(f, K, evidence=evidence, seeds=seeds, max_steps=max_steps, cache=cache)
    atlas = propagate(f, compute_F(f), L)
    checks = check_atlas(f, atlas, L)
    regular = [r for r in verdict.orbits if r.kind is Kind.REGULAR]
    regions = [r.region for r in regular]
    captures = target_times(f, atlas, regions, max_depth=max_depth)
    manifolds = [stable_manifold_interior(f, atlas, reg, captures, i) for i, reg in enumerate(regions)]
    dec = decompose_and_beta(f, manifolds, captures, verdict.orbits)
    disjoint = all(
        not intersect_sets(a.open_intervals, b.open_intervals)
        for i, a in enumerate(manifolds)
        for b in manifolds[i + 1 :]
    )
    return Analysis(f, verdict, atlas, checks, captures, manifolds, dec, regions_disjoint(verdict.orbits), disjoint)
