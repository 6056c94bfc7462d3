"""First-return maps of pseudo-billiards in convex polygons.

A particle crosses a convex polygon in a straight line; when it reaches the
boundary its velocity is reset to the field direction attached to the point
it hit.  Recording only the boundary hits gives a map of the boundary, and
with the boundary parameterized by normalized arclength that map is
piecewise affine.

Field pieces are given per edge in the edge's own chart: edge ``k`` runs from
vertex ``k`` to vertex ``k+1`` with local coordinate ``lam`` in ``[0, 1)``, so
each vertex belongs to the edge that starts there.

Coordinates are exact.  Edge lengths may be irrational, but only if all of
them are rational multiples of one square root; other polygons need
``approximate=True``, which switches to 50-digit decimals.
"""

from __future__ import annotations

import contextlib
import decimal
import functools
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .core import AffinePiece, PiecewiseAffineContraction, validate
from .errors import CornerHit, IncommensurableEdges, NonInjective, NotInward
from .intervals import SidedInterval, fmt, rational
from .surd import Surd

Point = tuple


@dataclass(frozen=True)
class FieldPiece:
    edge: int
    lo: mpq
    hi: mpq
    direction: tuple[mpq, mpq]

    def to_json(self) -> dict:
        return {
            "edge": self.edge,
            "lo": fmt(self.lo),
            "hi": fmt(self.hi),
            "direction": [fmt(c) for c in self.direction],
        }


class _Exact:
    approximate = False

    def __init__(self):
        self.d = 1

    def context(self):
        return contextlib.nullcontext()

    def num(self, q):
        return Surd(q)

    def sqrt(self, q):
        s = Surd.sqrt(q)
        if s.d != 1:
            if self.d not in (1, s.d):
                raise IncommensurableEdges(f"edge lengths need both sqrt({self.d}) and sqrt({s.d})")
            self.d = s.d
        return s


class _Approx:
    approximate = True

    def __init__(self, digits=50):
        self.ctx = decimal.Context(prec=digits)

    def context(self):
        return decimal.localcontext(self.ctx)

    def num(self, q):
        q = rational(q)
        return self.ctx.divide(decimal.Decimal(int(q.numerator)), decimal.Decimal(int(q.denominator)))

    def sqrt(self, q):
        return self.num(q).sqrt(self.ctx)


def _in_scene_context(fn):
    # decimal arithmetic picks up its precision from the active context
    @functools.wraps(fn)
    def wrapper(scene, *args, **kwargs):
        with scene.ar.context():
            return fn(scene, *args, **kwargs)

    return wrapper


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _sub(u, v):
    return (u[0] - v[0], u[1] - v[1])


class PolygonScene:
    """Convex polygon (counterclockwise) with a piecewise constant inward field per edge.

    Fields must point strictly inward along the open edges.  At a vertex the
    field may graze the previous edge; ``first_return`` refuses such a point,
    and the extracted map gives it the limit value from the right.
    """

    def __init__(self, vertices: Sequence[Point], fields: Sequence[FieldPiece], name: str | None = None, approximate: bool = False):
        self.name = name
        self.vertices = [(rational(x), rational(y)) for x, y in vertices]
        self.fields = sorted(
            (FieldPiece(int(fp.edge), rational(fp.lo), rational(fp.hi), (rational(fp.direction[0]), rational(fp.direction[1]))) for fp in fields),
            key=lambda fp: (fp.edge, fp.lo),
        )
        self.approximate = approximate
        self.ar = _Approx() if approximate else _Exact()
        self._check_polygon()
        with self.ar.context():
            self._setup()

    def _setup(self):
        ar = self.ar
        s = len(self.vertices)
        self.V = [(ar.num(x), ar.num(y)) for x, y in self.vertices]
        self.W = [_sub(self.V[(k + 1) % s], self.V[k]) for k in range(s)]
        self.lengths = []
        for k in range(s):
            dx, dy = _sub(self.vertices[(k + 1) % s], self.vertices[k])
            self.lengths.append(ar.sqrt(dx * dx + dy * dy))
        self.cum = [ar.num(0)]
        for length in self.lengths:
            self.cum.append(self.cum[-1] + length)
        self.perimeter = self.cum[-1]
        self._check_fields()

    @property
    def s(self) -> int:
        return len(self.vertices)

    @property
    def field_discontinuities(self) -> int:
        """Points of the boundary where the field direction changes."""
        seq = [fp.direction for fp in self.fields]
        return sum(a != b for a, b in zip(seq, seq[1:] + seq[:1]))

    def _check_polygon(self):
        s = len(self.vertices)
        if s < 3:
            raise ValueError("a polygon needs at least three vertices")
        for k in range(s):
            a, b, c = self.vertices[k], self.vertices[(k + 1) % s], self.vertices[(k + 2) % s]
            if _cross(_sub(b, a), _sub(c, b)) <= 0:
                raise ValueError(f"polygon is not strictly convex and counterclockwise at vertex {(k + 1) % s}")

    def _check_fields(self):
        s = self.s
        for k in range(s):
            pieces = [fp for fp in self.fields if fp.edge == k]
            pos = mpq(0)
            for fp in pieces:
                if fp.lo != pos or not fp.lo < fp.hi:
                    raise ValueError(f"field pieces on edge {k} must tile [0, 1) in order")
                pos = fp.hi
            if pos != 1:
                raise ValueError(f"field pieces on edge {k} must tile [0, 1)")
        for fp in self.fields:
            if fp.edge < 0 or fp.edge >= s:
                raise ValueError(f"field piece on missing edge {fp.edge}")
            d = fp.direction
            w = _sub(self.vertices[(fp.edge + 1) % s], self.vertices[fp.edge])
            if _cross(w, d) <= 0:
                raise NotInward(f"field {d} on edge {fp.edge} does not point into the polygon")

    def field_at(self, k: int, lam) -> FieldPiece:
        for fp in self.fields:
            if fp.edge == k and self.ar.num(fp.lo) <= lam < self.ar.num(fp.hi):
                return fp
        raise ValueError(f"no field at edge {k}, position {lam}")

    def locate(self, t):
        """``(edge, lam)`` of the normalized boundary parameter ``t``."""
        arc = t * self.perimeter
        for k in range(self.s):
            if arc < self.cum[k + 1]:
                return k, (arc - self.cum[k]) / self.lengths[k]
        raise ValueError("parameter outside [0, 1)")

    def parameter(self, k: int, lam):
        return (self.cum[k] + lam * self.lengths[k]) / self.perimeter

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "vertices": [[fmt(x), fmt(y)] for x, y in self.vertices],
            "fields": [fp.to_json() for fp in self.fields],
            "approximate": self.approximate,
        }


def _exit(scene: PolygonScene, k: int, lam, d):
    """Edge and local coordinate where the ray from edge ``k`` at ``lam`` along ``d`` leaves."""
    ar = scene.ar
    dd = (ar.num(d[0]), ar.num(d[1]))
    X = (scene.V[k][0] + lam * scene.W[k][0], scene.V[k][1] + lam * scene.W[k][1])
    best = None
    for j in range(scene.s):
        if j == k:
            continue
        D = _cross(dd, scene.W[j])
        if D == 0:
            continue
        rel = _sub(scene.V[j], X)
        tau = _cross(rel, scene.W[j]) / D
        mu = _cross(rel, dd) / D
        if tau > 0 and 0 <= mu <= 1 and (best is None or tau < best[0]):
            best = (tau, j, mu)
    if best is None:
        raise NotInward(f"ray from edge {k} at {lam} does not re-enter the boundary")
    return best[1], best[2]


@_in_scene_context
def first_return(scene: PolygonScene, t):
    """Normalized parameter of the next boundary hit from parameter ``t``."""
    k, lam = scene.locate(t)
    fp = scene.field_at(k, lam)
    if lam == 0:
        prev = scene.W[k - 1]
        if _cross(prev, (scene.ar.num(fp.direction[0]), scene.ar.num(fp.direction[1]))) <= 0:
            raise NotInward(f"field leaves the polygon at vertex {k}")
    j, mu = _exit(scene, k, lam, fp.direction)
    if mu == 0 or mu == 1:
        v = j if mu == 0 else (j + 1) % scene.s
        raise CornerHit(f"ray from parameter {t} lands on vertex {v}", vertex=v)
    return scene.parameter(j, mu)


@dataclass
class ExtractPiece:
    lo: object
    hi: object
    slope: object
    intercept: object
    source_edge: int
    field_index: int
    target_edge: int

    def __call__(self, t):
        return self.slope * t + self.intercept

    def to_json(self) -> dict:
        show = str if not isinstance(self.slope, decimal.Decimal) else (lambda v: f"{float(v):.17g}")
        return {
            "lo": show(self.lo),
            "hi": show(self.hi),
            "slope": show(self.slope),
            "intercept": show(self.intercept),
            "source_edge": self.source_edge,
            "field_piece": self.field_index,
            "target_edge": self.target_edge,
        }


@dataclass
class ReturnMapExtract:
    scene: PolygonScene
    pieces: list[ExtractPiece]
    contractive: bool
    injective: bool
    vertex_crossings: int
    field_discontinuities: int
    map: PiecewiseAffineContraction | None = None
    reasons: list[str] = field(default_factory=list)

    @property
    def approximate(self) -> bool:
        return self.scene.approximate

    @property
    def breakpoint_count(self) -> int:
        return len(self.pieces) - 1

    def evaluate(self, t):
        for p in self.pieces:
            if p.lo <= t < p.hi:
                return p(t)
        raise ValueError(f"{t} is outside [0, 1)")

    def to_json(self) -> dict:
        return {
            "scene": self.scene.name,
            "approximate": self.approximate,
            "pieces": [p.to_json() for p in self.pieces],
            "contractive": self.contractive,
            "injective": self.injective,
            "breakpoints": self.breakpoint_count,
            "vertex_crossings": self.vertex_crossings,
            "field_discontinuities": self.field_discontinuities,
            "polygon_sides": self.scene.s,
            "emitted": self.map is not None,
            "reasons": self.reasons,
        }


@_in_scene_context
def extract_return_map(scene: PolygonScene, strict: bool = False) -> ReturnMapExtract:
    """Split every field piece at the preimages of the vertices and read off the affine pieces.

    The vertex preimage itself keeps the value of the piece to its right,
    i.e. the limit of its neighbours.  ``strict=True`` raises
    ``NonInjective`` when the return map folds instead of only reporting it.
    """
    ar = scene.ar
    s = scene.s
    pieces = []
    crossings = 0
    for idx, fp in enumerate(scene.fields):
        k = fp.edge
        d = (ar.num(fp.direction[0]), ar.num(fp.direction[1]))
        wk = scene.W[k]
        cwd = _cross(d, wk)
        lo, hi = ar.num(fp.lo), ar.num(fp.hi)
        cuts = []
        for u in range(s):
            if u in (k, (k + 1) % s):
                continue
            lam_u = _cross(d, _sub(scene.V[u], scene.V[k])) / cwd
            if lo < lam_u < hi:
                cuts.append(lam_u)
        cuts.sort()
        crossings += len(cuts)
        bounds = [lo] + cuts + [hi]
        for a, b in zip(bounds, bounds[1:]):
            mid = (a + b) / 2
            j, _ = _exit(scene, k, mid, fp.direction)
            D = _cross(d, scene.W[j])
            mu0 = _cross(_sub(scene.V[j], scene.V[k]), d) / D
            mu1 = -_cross(wk, d) / D
            lk, lj = scene.lengths[k], scene.lengths[j]
            slope = mu1 * lj / lk
            intercept = (scene.cum[j] + lj * mu0 - lj * mu1 * scene.cum[k] / lk) / scene.perimeter
            pieces.append(ExtractPiece(scene.parameter(k, a), scene.parameter(k, b), slope, intercept, k, idx, j))
    contractive = all(abs(p.slope) < 1 for p in pieces)
    images = []
    for p in pieces:
        y0, y1 = p(p.lo), p(p.hi)
        images.append((min(y0, y1), max(y0, y1)))
    images.sort()
    injective = all(a[1] <= b[0] for a, b in zip(images, images[1:]))
    ext = ReturnMapExtract(scene, pieces, contractive, injective, crossings, scene.field_discontinuities)
    if not injective:
        ext.reasons.append("NonInjective")
        if strict:
            raise NonInjective("the return map folds: two pieces have overlapping images")
    if not contractive:
        ext.reasons.append("NonContractive")
    if scene.approximate:
        ext.reasons.append("approximate arithmetic")
    elif not all(isinstance(v, Surd) and v.is_rational for p in pieces for v in (p.lo, p.hi, p.slope, p.intercept)):
        ext.reasons.append(f"coefficients lie in Q(sqrt({scene.ar.d})), not Q")
    if not ext.reasons:
        g = PiecewiseAffineContraction(
            [AffinePiece(p.slope.to_rational(), p.intercept.to_rational(), SidedInterval(p.lo.to_rational(), p.hi.to_rational(), True, False)) for p in pieces],
            name=f"return map of {scene.name or 'scene'}",
        )
        rep = validate(g)
        if rep.ok:
            ext.map = g
        else:
            ext.reasons.extend(rep.kinds())
    return ext


@_in_scene_context
def sample_agreement(scene: PolygonScene, ext: ReturnMapExtract, per_piece: int = 256) -> tuple[int, int]:
    """``(matches, samples)``: first_return against the extracted formula at interior points."""
    ok = total = 0
    for p in ext.pieces:
        for i in range(1, per_piece + 1):
            t = p.lo + (p.hi - p.lo) * scene.ar.num(mpq(i, per_piece + 1))
            total += 1
            try:
                y = first_return(scene, t)
            except CornerHit:
                continue
            if scene.approximate:
                ok += abs(y - p(t)) < decimal.Decimal("1e-40")
            else:
                ok += y == p(t)
    return ok, total


# ---------------------------------------------------------------------------
# ready-made scenes


def right_triangle() -> PolygonScene:
    """Triangle (0,0), (1,0), (0,1): bottom field (1,1), hypotenuse (-1,0), left (1,-1)."""
    one = mpq(1)
    return PolygonScene(
        [(0, 0), (1, 0), (0, 1)],
        [
            FieldPiece(0, mpq(0), one, (one, one)),
            FieldPiece(1, mpq(0), one, (-one, mpq(0))),
            FieldPiece(2, mpq(0), one, (one, -one)),
        ],
        name="right-triangle",
    )


def pinwheel_square() -> PolygonScene:
    """Unit square with each edge's field tilted so every return contracts by 1/2."""
    h = mpq(1, 2)
    one = mpq(1)
    return PolygonScene(
        [(0, 0), (1, 0), (1, 1), (0, 1)],
        [
            FieldPiece(0, mpq(0), one, (one, h)),
            FieldPiece(1, mpq(0), one, (-h, one)),
            FieldPiece(2, mpq(0), one, (-one, -h)),
            FieldPiece(3, mpq(0), one, (h, -one)),
        ],
        name="pinwheel-square",
    )


def transport_square() -> PolygonScene:
    """Unit square with straight-across fields: every return preserves length."""
    one, z = mpq(1), mpq(0)
    return PolygonScene(
        [(0, 0), (1, 0), (1, 1), (0, 1)],
        [
            FieldPiece(0, z, one, (z, one)),
            FieldPiece(1, z, one, (-one, z)),
            FieldPiece(2, z, one, (z, -one)),
            FieldPiece(3, z, one, (one, z)),
        ],
        name="transport-square",
    )
