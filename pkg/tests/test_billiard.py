import pytest
from gmpy2 import mpq

from pcontract.billiard import (
    FieldPiece,
    PolygonScene,
    extract_return_map,
    first_return,
    pinwheel_square,
    right_triangle,
    sample_agreement,
    transport_square,
)
from pcontract.census import census_verdict
from pcontract.errors import CornerHit, IncommensurableEdges, NotInward
from pcontract.surd import Surd

q = mpq
ONE, Z = q(1), q(0)
SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def test_vertical_transport_hits_opposite_point():
    sc = transport_square()
    for t in (q(1, 7), q(1, 2), q(9, 10)):
        # (t, 0) on the bottom edge goes to (t, 1), which sits at 1 - t along the top edge
        assert first_return(sc, Surd(t / 4)) == (2 + 1 - t) / 4


def test_triangle_bottom_ray_lands_on_hypotenuse():
    sc = right_triangle()
    P = 2 + Surd.sqrt(2)
    for t in (q(1, 5), q(1, 4), q(2, 3)):
        landing = ((1 + t) / 2, (1 - t) / 2)
        assert landing[0] + landing[1] == 1
        lam = 1 - landing[0]  # distance from (1, 0) along the hypotenuse, in units of its direction (-1, 1)
        expected = (1 + Surd.sqrt(2) * lam) / P
        assert first_return(sc, Surd(t) / P) == expected


def test_field_parallel_to_edge_is_not_inward():
    with pytest.raises(NotInward):
        PolygonScene(SQUARE, [FieldPiece(0, Z, ONE, (ONE, Z))] + [FieldPiece(k, Z, ONE, (-ONE, -ONE)) for k in (1, 2, 3)])


def test_outward_field_rejected():
    fields = [FieldPiece(k, Z, ONE, d) for k, d in enumerate([(Z, -ONE), (-ONE, Z), (Z, -ONE), (ONE, Z)])]
    with pytest.raises(NotInward):
        PolygonScene(SQUARE, fields)


def test_nonconvex_or_clockwise_rejected():
    with pytest.raises(ValueError):
        PolygonScene(list(reversed(SQUARE)), [])


def test_corner_hit_reported():
    fields = [FieldPiece(0, Z, ONE, (ONE, ONE))] + [FieldPiece(k, Z, ONE, d) for k, d in ((1, (-ONE, Z)), (2, (Z, -ONE)), (3, (ONE, Z)))]
    sc = PolygonScene(SQUARE, fields)
    with pytest.raises(CornerHit) as err:
        first_return(sc, Surd(0))
    assert err.value.vertex == 2


def test_transport_square_is_not_contractive():
    sc = transport_square()
    ext = extract_return_map(sc)
    assert all(abs(p.slope) == 1 for p in ext.pieces)
    assert not ext.contractive and ext.map is None
    assert sample_agreement(sc, ext, 64) == (256, 256)


def test_triangle_extract():
    sc = right_triangle()
    ext = extract_return_map(sc)
    bottom = ext.pieces[0]
    assert (bottom.source_edge, bottom.target_edge) == (0, 1)
    # moving dx along the bottom moves the landing point dx/2 in x, i.e. sqrt(2)*dx/2 of hypotenuse
    assert bottom.slope == -Surd.sqrt(2) / 2
    assert abs(bottom.slope) < 1
    assert ext.breakpoint_count <= ext.field_discontinuities + sc.s
    assert ext.map is None and any("sqrt(2)" in r for r in ext.reasons)


def test_triangle_samples_agree_exactly():
    sc = right_triangle()
    ext = extract_return_map(sc)
    matches, total = sample_agreement(sc, ext, 256)
    assert matches == total == 256 * len(ext.pieces)


def test_pinwheel_emits_contraction():
    sc = pinwheel_square()
    ext = extract_return_map(sc)
    f = ext.map
    assert f is not None and f.n == 4
    assert [p.slope for p in f.pieces] == [q(-1, 2)] * 4
    assert f.pieces[0].intercept == q(3, 8) and f.breakpoints[1] == q(1, 4)
    assert sample_agreement(sc, ext, 256) == (1024, 1024)
    v = census_verdict(f, 24, evidence=False)
    assert v.m + v.d <= f.n


def test_vertex_preimage_splits_a_piece():
    fields = [
        FieldPiece(0, Z, q(1, 2), (ONE, ONE)),
        FieldPiece(0, q(1, 2), ONE, (-ONE, 2 * ONE)),
        FieldPiece(1, Z, ONE, (-ONE, Z)),
        FieldPiece(2, Z, ONE, (Z, -ONE)),
        FieldPiece(3, Z, ONE, (ONE, q(1, 3))),
    ]
    sc = PolygonScene(SQUARE, fields)
    ext = extract_return_map(sc)
    assert ext.vertex_crossings == 1
    assert ext.breakpoint_count <= ext.field_discontinuities + sc.s
    assert sample_agreement(sc, ext, 32) == (32 * len(ext.pieces), 32 * len(ext.pieces))


def test_incommensurable_edges_need_approximate_mode():
    # edge lengths 1, sqrt(2), sqrt(5), 2
    verts = [(0, 0), (1, 0), (2, 1), (0, 2)]
    fields = [FieldPiece(k, Z, ONE, d) for k, d in enumerate([(Z, ONE), (-ONE, Z), (Z, -ONE), (ONE, Z)])]
    with pytest.raises(IncommensurableEdges):
        PolygonScene(verts, fields)
    sc = PolygonScene(verts, fields, approximate=True)
    ext = extract_return_map(sc)
    assert ext.approximate and ext.map is None and "approximate arithmetic" in ext.reasons
    m, total = sample_agreement(sc, ext, 16)
    assert m == total
