import pytest
from gmpy2 import mpq

from pcontract.census import (
    CylinderCache,
    Externality,
    Kind,
    appendix_a_census,
    census_verdict,
    classify,
    enumerate_periodic_orbits,
    germ_oracle,
    is_trapping_interval,
    maximal_trapping_interval,
    trapping_region,
)
from pcontract.core import image_interval, omega_limit, validate
from pcontract.errors import DegenerateOwner, PreconditionFailed
from pcontract.fuzz import fuzz_generate
from pcontract.intervals import SidedInterval

q = mpq


def points(recs):
    return [r.points for r in recs]


def test_enumerate_examples(map_g, map_half, map_deg):
    assert points(enumerate_periodic_orbits(map_g, 2)) == [[q(3, 7)], [q(1, 54), q(16, 27)]]
    assert points(enumerate_periodic_orbits(map_half, 5)) == [[0]]
    assert points(enumerate_periodic_orbits(map_deg, 3)) == [[0], [q(3, 4)]]


def test_record_invariants(any_fixture):
    f = any_fixture
    for rec in enumerate_periodic_orbits(f, 12):
        k = rec.period
        assert rec.points[0] == min(rec.points)
        for i, p in enumerate(rec.points):
            assert f(p) == rec.points[(i + 1) % k]
        assert all(rec.points[d % k] != rec.points[0] for d in range(1, k))
        external = any(p == 0 or f.is_breakpoint(p) for p in rec.points)
        assert (rec.externality is Externality.EXTERNAL) == external
        if not external:
            assert rec.kind is Kind.REGULAR
        assert len(rec.word) == k


def test_classify_examples(map_g, map_deg, map_half):
    assert classify(map_g, [q(3, 7)]).kind is Kind.REGULAR
    c = classify(map_deg, [q(3, 4)])
    assert c.kind is Kind.DEGENERATE
    # the right germ is flipped to the left at step 1, where 3/4 only admits R
    assert ("R", 1) in c.blocking_steps
    h = classify(map_half, [0])
    assert h.kind is Kind.REGULAR and h.seed == "R"


def test_germ_oracle_agrees_with_classify(corpus_map):
    f = corpus_map
    for rec in enumerate_periodic_orbits(f, 10):
        regular = any(germ_oracle(f, rec.points).values())
        assert regular == (rec.kind is Kind.REGULAR), rec.points


def test_classify_is_orbit_invariant(corpus_map):
    f = corpus_map
    for rec in enumerate_periodic_orbits(f, 10):
        pts = rec.points
        for s in range(len(pts)):
            assert classify(f, pts[s:] + pts[:s]).kind is rec.kind


def test_map_deg_germs_all_break(map_deg):
    assert not any(germ_oracle(map_deg, [q(3, 4)]).values())
    with pytest.raises(DegenerateOwner):
        maximal_trapping_interval(map_deg, q(3, 4), 1)


def test_degenerate_orbits_have_no_trapping_interval(fuzz_map):
    for rec in enumerate_periodic_orbits(fuzz_map, 10):
        if rec.kind is Kind.DEGENERATE:
            with pytest.raises(DegenerateOwner):
                maximal_trapping_interval(fuzz_map, rec.points[0], rec.period)


def test_maximal_trapping_intervals_map_g(map_g):
    J = lambda p, k: maximal_trapping_interval(map_g, p, k).interval  # noqa: E731
    assert J(q(16, 27), 2) == SidedInterval(q(1, 2), q(1), True, False)
    assert J(q(3, 7), 1) == SidedInterval(q(1, 4), q(1, 2), False, False)
    assert J(q(1, 54), 2) == SidedInterval(q(0), q(1, 4), True, True)


@pytest.mark.parametrize("p,k", [(q(16, 27), 2), (q(3, 7), 1), (q(1, 54), 2)])
def test_trapping_interval_is_maximal(map_g, p, k):
    J = maximal_trapping_interval(map_g, p, k).interval
    assert is_trapping_interval(map_g, J, p, k)
    for eps in (q(1, 10**6), q(1, 1000), q(1, 50)):
        if J.lo - eps >= 0:
            assert not is_trapping_interval(map_g, SidedInterval(J.lo - eps, J.hi, True, J.hi_closed), p, k)
        if J.hi + eps < 1:
            assert not is_trapping_interval(map_g, SidedInterval(J.lo, J.hi + eps, J.lo_closed, False), p, k)
    if not J.lo_closed:
        assert not is_trapping_interval(map_g, J._replace(lo_closed=True), p, k)
    if not J.hi_closed and J.hi < 1:
        assert not is_trapping_interval(map_g, J._replace(hi_closed=True), p, k)


def test_trapping_regions(map_g, map_half):
    recs = enumerate_periodic_orbits(map_g, 2)
    r1, r2 = (trapping_region(map_g, r) for r in recs)
    assert r1.sorted_intervals() == [SidedInterval(q(1, 4), q(1, 2), False, False)]
    assert r2.sorted_intervals() == [SidedInterval(q(0), q(1, 4), True, True), SidedInterval(q(1, 2), q(1), True, False)]
    (h,) = enumerate_periodic_orbits(map_half, 3)
    assert trapping_region(map_half, h).sorted_intervals() == [SidedInterval(q(0), q(1), True, False)]


def test_closure_of_fixed_point_interval_reported(map_g):
    rec = enumerate_periodic_orbits(map_g, 1)[0]
    comp = trapping_region(map_g, rec).components[0].to_json()
    assert comp["interval"] == "(1/4, 1/2)" and comp["closure"] == "[1/4, 1/2]"


def test_region_properties(corpus_map):
    f = corpus_map
    kappa = validate(f).kappa
    cache = CylinderCache(f)
    for rec in enumerate_periodic_orbits(f, 10, cache):
        if rec.kind is Kind.DEGENERATE:
            continue
        region = trapping_region(f, rec, cache)
        assert len(region.components) == rec.period
        ivs = region.sorted_intervals()
        assert all(a.hi <= b.lo for a, b in zip(ivs, ivs[1:]))
        k = rec.period
        for comp in region.components:
            cur = comp.interval
            for ell in range(1, 11):
                for _ in range(k):
                    (cur,) = image_interval(f, cur)
                assert cur.length <= kappa ** (ell * k) * comp.interval.length


def test_verdicts(map_g, map_deg, map_half):
    v = census_verdict(map_g, 4)
    assert (v.m, v.d, v.bound_ok, v.tight) == (2, 0, True, True)
    assert v.evidence.converged == v.evidence.seeds == 1000
    v = census_verdict(map_deg, 4)
    assert (v.m, v.d, v.bound_ok, v.tight) == (1, 1, True, True)
    v = census_verdict(map_half, 4)
    assert (v.m, v.d, v.bound_ok, v.tight) == (1, 0, True, True)


def test_completeness_against_forward_iteration(any_fixture):
    f = any_fixture
    found = {p for r in enumerate_periodic_orbits(f, 24) for p in r.points}
    for i in range(0, 2048, 7):
        cyc = omega_limit(f, q(i, 2048), max_steps=2000)
        assert cyc is not None and set(cyc) <= found


def test_completeness_on_fuzz(fuzz_map):
    recs = enumerate_periodic_orbits(fuzz_map, 24)
    found = {p for r in recs for p in r.points}
    for i in range(0, 256, 5):
        cyc = omega_limit(fuzz_map, q(i, 256), max_steps=500)
        if cyc is not None:
            assert set(cyc) <= found


def test_increasing_census_examples(map_inc, map_half):
    res = {r.record.points[0]: r for r in appendix_a_census(map_inc)}
    assert set(res) == {q(1, 4), q(7, 8)}
    a = res[q(1, 4)]
    assert (a.epsilon, a.alpha, a.interval) == (q(1, 2), q(1, 2), SidedInterval(q(1, 4), q(1, 2), True, False))
    b = res[q(7, 8)]
    assert (b.epsilon, b.alpha) == (q(1), q(1))
    (h,) = appendix_a_census(map_half)
    assert (h.epsilon, h.alpha, h.interval) == (q(1), q(1), SidedInterval(q(0), q(1), True, False))


def test_increasing_census_precondition(map_g):
    with pytest.raises(PreconditionFailed):
        appendix_a_census(map_g)


@pytest.mark.parametrize("seed", range(10))
def test_increasing_census_matches_general_census(seed):
    f = fuzz_generate(3, seed, increasing=True, left_closed=True)
    fast = sorted(tuple(r.record.points) for r in appendix_a_census(f))
    general = enumerate_periodic_orbits(f, 24)
    assert fast == sorted(tuple(r.points) for r in general)
    assert all(r.kind is Kind.REGULAR for r in general)
