import re

import pytest
from gmpy2 import mpq

from pcontract.errors import UnknownKind
from pcontract.pipeline import analyze
from pcontract.plot import PALETTE, plot


def circles(svg):
    return re.findall(r'<circle cx="([\d.]+)" cy="([\d.]+)" r="3.5" fill="(#[0-9a-f]+)"', svg)


def test_graph_marks_owned_and_open_ends(map_g):
    svg = plot("graph", map_g)
    assert svg.count("<line") == 3  # diagonal and two pieces
    marks = circles(svg)
    # x = 1/2 is pixel 240: the left piece is open there, the right piece owns it
    at_half = sorted(fill for cx, _, fill in marks if cx == "240.00")
    assert at_half == ["#000", "#fff"]


def test_basins_colour_each_orbit(map_g):
    svg = plot("basins", map_g, analysis=analyze(map_g, evidence=False))
    rects = re.findall(r'<rect x="([\d.]+)" y="[\d.]+" width="([\d.]+)" height="60.00" fill="([^"]+)"', svg)
    by_colour = {}
    for x, w, fill in rects:
        by_colour.setdefault(fill, []).append((x, w))
    assert by_colour[PALETTE[0]] == [("140.00", "100.00")]
    assert by_colour[PALETTE[1]] == [("40.00", "100.00"), ("240.00", "200.00")]
    assert "url(#hatch)" in by_colour


def test_cobweb_heads_to_zero(map_deg):
    svg = plot("cobweb", map_deg, x0=mpq(9, 10), steps=30)
    xs = [float(m) for m in re.findall(r'x2="([\d.]+)" y2="[\d.]+" stroke="#d62728"', svg)]
    assert xs[-1] < xs[0] and abs(xs[-1] - 40) < 1


def test_gaps_and_determinism(map_g):
    assert plot("gaps", map_g, depth=10) == plot("gaps", map_g, depth=10)
    assert plot("graph", map_g) == plot("graph", map_g)


def test_unknown_kind(map_g):
    with pytest.raises(UnknownKind):
        plot("pie", map_g)
