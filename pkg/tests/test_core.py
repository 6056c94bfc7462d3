import pytest
from gmpy2 import mpq

from pcontract.core import (
    IDENTITY,
    AffinePiece,
    PiecewiseAffineContraction,
    PiecewisePolynomial,
    birkhoff_average,
    birkhoff_limit,
    cylinder_of,
    cylinders,
    ensure_valid,
    evaluate,
    image_interval,
    iterate,
    itinerary,
    omega_limit,
    orbit,
    preimage_point,
    validate,
)
from pcontract.errors import ArithmeticBudgetExceeded, InvalidMap, OutOfDomain
from pcontract.intervals import SidedInterval, set_contains

q = mpq


def pac(xs, slopes, intercepts, owners=None):
    return PiecewiseAffineContraction.from_breakpoints(xs, slopes, intercepts, owners)


def kinds(f):
    return {v.kind for v in validate(f).violations}


# -- validate ----------------------------------------------------------------


def test_validate_fixtures(map_g, map_half):
    assert validate(map_g).ok and validate(map_g).kappa == q(2, 5)
    assert validate(map_half).ok and validate(map_half).kappa == q(1, 2)


def test_validate_non_contractive():
    f = pac([0, q(1, 2), 1], [q(-2, 5), q(6, 5)], [q(3, 5), q(-1, 10)])
    assert "NonContractive" in kinds(f)


def test_validate_zero_slope():
    assert "ZeroSlope" in kinds(pac([0, q(1, 2), 1], [0, q(1, 2)], [q(1, 10), q(1, 2)]))


def test_validate_not_injective():
    assert kinds(pac([0, q(1, 2), 1], [q(1, 2), q(1, 2)], [0, q(-1, 8)])) == {"NotInjective"}


def test_validate_image_escapes():
    assert "ImageEscapes" in kinds(pac([0, 1], [q(1, 2)], [q(3, 4)]))


def test_validate_bad_partition():
    a = AffinePiece(q(1, 4), 0, SidedInterval(q(0), q(1, 2), True, True))
    b = AffinePiece(q(1, 4), q(1, 2), SidedInterval(q(1, 2), q(1), True, False))
    assert "NotPartition" in kinds(PiecewiseAffineContraction([a, b]))
    c = AffinePiece(q(1, 4), q(1, 2), SidedInterval(q(3, 5), q(1), True, False))
    assert "NotPartition" in kinds(PiecewiseAffineContraction([a, c]))


def test_validate_rejects_continuous_breakpoint():
    # x/2 split in two: the breakpoint is not a jump
    assert kinds(pac([0, q(1, 2), 1], [q(1, 2), q(1, 2)], [0, 0])) == {"NoJump"}


def test_ensure_valid_raises():
    with pytest.raises(InvalidMap):
        ensure_valid(pac([0, 1], [q(1, 2)], [q(3, 4)]))


# -- pointwise ---------------------------------------------------------------


def test_evaluate_examples(map_g, map_half):
    assert evaluate(map_g, q(1, 2)) == 0
    assert evaluate(map_g, q(3, 7)) == q(3, 7)
    assert evaluate(map_half, 0) == 0
    with pytest.raises(OutOfDomain):
        evaluate(map_g, 1)


def test_image_interval_examples(map_g, map_half, map_deg):
    assert image_interval(map_g, SidedInterval.make(0, q(1, 2))) == [SidedInterval(q(2, 5), q(3, 5), False, True)]
    assert image_interval(map_half, SidedInterval.make(0, 1)) == [SidedInterval.make(0, q(1, 2))]
    J = SidedInterval.make(0, q(3, 4), True, True)
    assert image_interval(map_deg, J) == [SidedInterval.make(0, q(3, 8)), SidedInterval.point(q(3, 4))]


def test_image_interval_matches_pointwise_oracle(any_fixture):
    f = any_fixture
    J = SidedInterval.make(q(1, 7), q(6, 7), False, True)
    img = image_interval(f, J)
    domain_pts = [q(i, 997) for i in range(997)]
    images = {f(x) for x in domain_pts if x in J}
    for y in [q(i, 1000) for i in range(1000)]:
        x = preimage_point(f, y)
        assert set_contains(img, y) == (x is not None and x in J)
    assert all(set_contains(img, y) for y in images)


def test_preimage_examples(map_g, map_half):
    assert preimage_point(map_g, q(1, 2)) == q(1, 4)
    assert preimage_point(map_g, q(1, 4)) is None
    assert preimage_point(map_half, q(1, 4)) == q(1, 2)


def test_orbit_examples(map_g, map_half, map_deg):
    assert orbit(map_g, q(16, 27), 2) == [q(16, 27), q(1, 54), q(16, 27)]
    assert orbit(map_g, q(16, 27), 2).cycle == (0, 2)
    assert orbit(map_half, q(1, 2), 3) == [q(1, 2), q(1, 4), q(1, 8), q(1, 16)]
    assert orbit(map_deg, q(3, 4), 2) == [q(3, 4)] * 3
    assert iterate(map_g, q(1, 4), 3) == q(3, 5)


def test_orbit_bit_budget(map_g):
    with pytest.raises(ArithmeticBudgetExceeded):
        orbit(map_g, q(1, 3), 200, max_bits=64)


def test_itinerary_examples(map_g, map_half):
    assert itinerary(map_g, q(16, 27), 4) == (2, 1, 2, 1)
    assert itinerary(map_half, q(2, 3), 5) == (1,) * 5
    assert itinerary(map_g, q(1, 4), 4) == (1, 2, 1, 2)


# -- cylinders ---------------------------------------------------------------


def test_cylinders_examples(map_g, map_half):
    assert len(cylinders(map_g, 1)) == 2
    c2 = cylinders(map_g, 2)
    assert [(c.support, c.word) for c in c2] == [
        (SidedInterval(q(0), q(1, 4), True, True), (1, 2)),
        (SidedInterval(q(1, 4), q(1, 2), False, False), (1, 1)),
        (SidedInterval(q(1, 2), q(1), True, False), (2, 1)),
    ]
    for k in (1, 4, 7):
        (c,) = cylinders(map_half, k)
        assert c.word == (1,) * k and c.slope == q(1, 2**k)


def test_cylinder_coherence_and_count(any_fixture):
    f = any_fixture
    grid = [q(i, 211) for i in range(211)]
    kappa = validate(f).kappa
    for k in range(1, 26):
        cyls = cylinders(f, k)
        assert len(cyls) <= k * (f.n - 1) + 1
        assert abs(max(abs(c.slope) for c in cyls)) <= kappa**k
        if k in (1, 2, 5, 11, 25):
            for x in grid:
                c = cylinder_of(f, x, k)
                assert x in c.support
                assert itinerary(f, x, k) == c.word
                assert iterate(f, x, k) == c.slope * x + c.intercept


def test_cylinder_count_on_fuzz(fuzz_map):
    for k in range(1, 26):
        assert len(cylinders(fuzz_map, k)) <= k * (fuzz_map.n - 1) + 1


def test_partition_injectivity_contraction(any_fixture):
    f = any_fixture
    grid = [q(i, 503) for i in range(503)]
    owners = [[i for i, p in enumerate(f.pieces) if x in p.domain] for x in grid]
    assert all(len(o) == 1 for o in owners)
    vals = [f(x) for x in grid]
    assert len(set(vals)) == len(vals)
    kappa = validate(f).kappa
    for x, y in zip(grid, grid[1:]):
        if f.piece_index(x) == f.piece_index(y):
            assert abs(f(x) - f(y)) <= kappa * abs(x - y)


# -- averages ------------------------------------------------------------------


def test_birkhoff_limits(map_g, map_half):
    assert birkhoff_limit(map_half, IDENTITY, q(1, 2)) == 0
    assert birkhoff_limit(map_g, IDENTITY, q(1, 3)) == q(3, 7)
    assert birkhoff_limit(map_g, IDENTITY, q(16, 27)) == q(11, 36)
    assert omega_limit(map_g, q(16, 27)) == [q(16, 27), q(1, 54)]


def test_birkhoff_average_exact(map_g):
    assert birkhoff_average(map_g, IDENTITY, q(16, 27), 2) == q(11, 36)
    step = PiecewisePolynomial([q(1, 2)], [[0], [1]])
    assert birkhoff_average(map_g, step, q(16, 27), 4) == q(1, 2)
