import random

import pytest
from gmpy2 import mpq

from pcontract.conjugacy import ConjugacyTable, h_inverse, h_value, nu_of_interval, snap_normal_form, verify_half_slopes
from pcontract.core import image_interval, validate
from pcontract.errors import OutOfDomain, ResolutionExceeded
from pcontract.fuzz import fuzz_generate
from pcontract.intervals import SidedInterval

q = mpq


def op(a, b):
    return SidedInterval(q(a), q(b), False, False)


@pytest.fixture(scope="module")
def g_table():
    from pcontract.fixtures import fixture

    return ConjugacyTable(fixture("map-g"), 40)


def test_nu_examples_map_half(map_half):
    t = ConjugacyTable(map_half, 30)
    for J, expected in ((op(q(1, 2), 1), q(1, 2)), (op(q(1, 4), q(1, 2)), q(1, 4)), (op(q(1, 2), q(3, 4)), q(1, 4))):
        e = nu_of_interval(t, J)
        assert e.lo == e.hi == expected


def test_h_examples(map_half, map_g):
    t = ConjugacyTable(map_half, 30)
    assert h_value(t, q(1, 2)).lo == h_value(t, q(1, 2)).hi == q(1, 2)
    e = h_inverse(t, q(1, 4), q(1, 10**6))
    assert q(1, 4) in e
    tg = ConjugacyTable(map_g, 10)
    assert h_value(tg, q(1, 2)).width <= q(1, 2**11)
    assert h_value(tg, 0).hi == 0


def test_h_inverse_round_trip(g_table):
    e = g_table.h(q(16, 27))
    back = h_inverse(g_table, e.mid, q(1, 10**6))
    assert q(16, 27) in back


def test_h_inverse_resolution_error(map_g):
    t = ConjugacyTable(map_g, 2)
    with pytest.raises(ResolutionExceeded):
        h_inverse(t, q(1, 2), q(1, 10**9))


def test_domain_errors(g_table):
    with pytest.raises(OutOfDomain):
        h_value(g_table, q(3, 2))
    with pytest.raises(OutOfDomain):
        h_inverse(g_table, 1, q(1, 10))


def test_total_mass_is_geometric(corpus_map):
    t = ConjugacyTable(corpus_map, 20)
    assert t.covered == 1 - q(1, 2**21)
    assert t.tail == q(1, 2**21)


def test_halving_law(g_table):
    f = g_table.f
    rng = random.Random(5)
    for _ in range(200):
        a, b = sorted(q(rng.randint(0, 999), 1000) for _ in range(2))
        if a == b:
            continue
        B = op(a, b)
        whole = g_table.nu(B)
        parts = image_interval(f, B)
        lo = sum(g_table.nu(p).lo for p in parts)
        hi = sum(g_table.nu(p).hi for p in parts)
        assert lo <= whole.hi / 2 and whole.lo / 2 <= hi


def test_monotone_on_grid(g_table):
    slack = q(1, 2**40)
    vals = [g_table.h(q(i, 1024)) for i in range(1025)]
    for a, b in zip(vals, vals[1:]):
        assert a.hi <= b.lo + slack
    assert vals[0].hi == 0 and vals[-1].lo == 1


def test_enclosures_nest(map_g):
    coarse, fine = ConjugacyTable(map_g, 12), ConjugacyTable(map_g, 20)
    for i in range(0, 1000, 37):
        x = q(i, 1000)
        assert coarse.h(x).contains(fine.h(x))


def test_conjugacy_round_trip(g_table):
    f = g_table.f
    for i in range(1, 256):
        x = q(i, 256)
        lhs = g_table.h(f(x))
        hx = g_table.h(x)
        if f.piece_index(hx.lo) != f.piece_index(hx.hi):
            continue
        try:
            rhs = g_table.normalized(hx.mid)
        except ResolutionExceeded:
            continue
        assert rhs.lo <= lhs.hi and lhs.lo <= rhs.hi


@pytest.mark.parametrize("name", ["map-half", "map-g", "map-deg", "map-inc", "tight-3", "tight-4"])
def test_half_slopes_on_fixtures(name):
    from pcontract.fixtures import fixture

    f = fixture(name)
    rep = verify_half_slopes(f, samples_per_piece=40)
    assert rep.ok
    signs = [p.expected for p in rep.pieces]
    assert signs == [q(1, 2) if pc.slope > 0 else q(-1, 2) for pc in f.pieces]


def test_half_slopes_exact_for_map_half(map_half):
    rep = verify_half_slopes(map_half, samples_per_piece=20, L=30)
    (p,) = rep.pieces
    assert abs(p.low - q(1, 2)) < q(1, 10**6) and abs(p.high - q(1, 2)) < q(1, 10**6)


@pytest.mark.parametrize("seed", range(5))
def test_half_slopes_on_fuzz(seed):
    assert verify_half_slopes(fuzz_generate(3, seed), samples_per_piece=20).ok


def test_snap_is_labelled_approximate(map_g, g_table):
    g = snap_normal_form(map_g, g_table)
    assert "approximate" in g.name
    assert all(abs(p.slope) == q(1, 2) for p in g.pieces)
    assert validate(g).ok
