"""Small hand-written SVG figures.

Coordinates are rounded to two decimals when written, so the output is
byte-identical for identical inputs.  Floats appear only here, as pixel
positions.
"""

from __future__ import annotations

from .core import PiecewiseAffineContraction, orbit
from .errors import UnknownKind
from .intervals import rational

SIZE = 400
MARGIN = 40
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"]
KINDS = ("graph", "cobweb", "basins", "gaps")


def _px(x) -> float:
    return MARGIN + float(x) * SIZE


def _py(y) -> float:
    return MARGIN + (1 - float(y)) * SIZE


def _n(v: float) -> str:
    return f"{v:.2f}"


class _Canvas:
    def __init__(self, title: str, height: int = SIZE):
        self.height = height
        self.items = [f"<title>{_escape(title)}</title>"]

    def line(self, x1, y1, x2, y2, stroke="#000", width=1.5, extra=""):
        self.items.append(
            f'<line x1="{_n(x1)}" y1="{_n(y1)}" x2="{_n(x2)}" y2="{_n(y2)}" stroke="{stroke}" stroke-width="{width}"{extra}/>'
        )

    def circle(self, cx, cy, filled, stroke="#000"):
        fill = stroke if filled else "#fff"
        self.items.append(f'<circle cx="{_n(cx)}" cy="{_n(cy)}" r="3.5" fill="{fill}" stroke="{stroke}" stroke-width="1.2"/>')

    def rect(self, x, y, w, h, fill, extra=""):
        self.items.append(f'<rect x="{_n(x)}" y="{_n(y)}" width="{_n(w)}" height="{_n(h)}" fill="{fill}"{extra}/>')

    def text(self, x, y, s, size=12):
        self.items.append(f'<text x="{_n(x)}" y="{_n(y)}" font-family="sans-serif" font-size="{size}">{_escape(s)}</text>')

    def frame(self):
        self.items.append(
            f'<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="#888" stroke-width="1"/>'
        )

    def render(self, defs: str = "") -> str:
        w = SIZE + 2 * MARGIN
        h = self.height + 2 * MARGIN
        head = f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">'
        body = "\n".join(self.items)
        return f"{head}\n{defs}{body}\n</svg>\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _draw_graph(c: _Canvas, f: PiecewiseAffineContraction, color="#000"):
    for p in f.pieces:
        d = p.domain
        y0, y1 = p(d.lo), p(d.hi)
        c.line(_px(d.lo), _py(y0), _px(d.hi), _py(y1), stroke=color, width=2)
        c.circle(_px(d.lo), _py(y0), d.lo_closed, color)
        if d.hi < 1:
            c.circle(_px(d.hi), _py(y1), d.hi_closed, color)


def graph_svg(f: PiecewiseAffineContraction) -> str:
    """Pieces with filled dots at owned ends and open dots at the others."""
    c = _Canvas(f"graph of {f.name or 'map'}")
    c.frame()
    c.line(_px(0), _py(0), _px(1), _py(1), stroke="#bbb", width=1, extra=' stroke-dasharray="4 3"')
    _draw_graph(c, f)
    return c.render()


def cobweb_svg(f: PiecewiseAffineContraction, x0, steps: int = 40) -> str:
    c = _Canvas(f"cobweb of {f.name or 'map'} from {x0}")
    c.frame()
    c.line(_px(0), _py(0), _px(1), _py(1), stroke="#bbb", width=1, extra=' stroke-dasharray="4 3"')
    _draw_graph(c, f, "#555")
    pts = orbit(f, rational(x0), steps, max_bits=4096)
    x = pts[0]
    c.line(_px(x), _py(0), _px(x), _py(pts[1]), stroke=PALETTE[1], width=1)
    for a, b in zip(pts[1:], pts[2:]):
        c.line(_px(x), _py(a), _px(a), _py(a), stroke=PALETTE[1], width=1)
        c.line(_px(a), _py(a), _px(a), _py(b), stroke=PALETTE[1], width=1)
        x = a
    return c.render()


_HATCH = (
    '<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">'
    '<line x1="0" y1="0" x2="0" y2="6" stroke="#999" stroke-width="2"/></pattern></defs>\n'
)


def basins_svg(analysis) -> str:
    """One colour per orbit over its open basin components; everything else hatched."""
    f = analysis.f
    c = _Canvas(f"basins of {f.name or 'map'}", height=120)
    c.rect(_px(0), MARGIN, SIZE, 60, "url(#hatch)")
    for rec in analysis.manifolds:
        color = PALETTE[rec.orbit_index % len(PALETTE)]
        for iv in rec.open_intervals:
            c.rect(_px(iv.lo), MARGIN, float(iv.hi - iv.lo) * SIZE, 60, color)
    for k, rec in enumerate(analysis.regular):
        color = PALETTE[k % len(PALETTE)]
        for p in rec.points:
            c.line(_px(p), MARGIN + 62, _px(p), MARGIN + 72, stroke=color, width=2)
    for rec in analysis.verdict.orbits:
        if rec not in analysis.regular:
            for p in rec.points:
                c.circle(_px(p), MARGIN + 80, False)
    for x in f.interior_breakpoints:
        c.line(_px(x), MARGIN - 6, _px(x), MARGIN, stroke="#000", width=1)
    c.text(_px(0), MARGIN + 110, "coloured: basin interiors; hatched: not yet assigned; ticks: orbit points")
    return c.render(_HATCH)


def gaps_svg(atlas, max_depth: int | None = None) -> str:
    """Layer tiling: one row per depth, one colour per gap interval."""
    rows = max((len(ls) for ls in atlas.layers), default=0)
    if max_depth is not None:
        rows = min(rows, max_depth + 1)
    row_h = 8
    c = _Canvas("gap layers", height=max(rows * row_h, 20))
    for j, ls in enumerate(atlas.layers):
        color = PALETTE[j % len(PALETTE)]
        for ly in ls[:rows]:
            iv = ly.interval
            c.rect(_px(iv.lo), MARGIN + ly.ell * row_h, max(float(iv.hi - iv.lo) * SIZE, 0.5), row_h - 1, color)
    return c.render()


def plot(kind: str, f: PiecewiseAffineContraction, analysis=None, x0=None, steps: int = 40, depth: int = 20) -> str:
    """Render ``kind`` (one of ``KINDS``) for ``f``."""
    if kind == "graph":
        return graph_svg(f)
    if kind == "cobweb":
        return cobweb_svg(f, x0 if x0 is not None else rational("9/10"), steps)
    if kind == "basins":
        if analysis is None:
            from .pipeline import analyze

            analysis = analyze(f, evidence=False)
        return basins_svg(analysis)
    if kind == "gaps":
        if analysis is None:
            from .gapflow import compute_F, propagate

            return gaps_svg(propagate(f, compute_F(f), depth), depth)
        return gaps_svg(analysis.atlas, depth)
    raise UnknownKind(f"unknown plot kind {kind!r}; choose from {', '.join(KINDS)}")
