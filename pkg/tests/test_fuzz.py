import pytest

from pcontract.census import Kind, enumerate_periodic_orbits
from pcontract.core import validate
from pcontract.errors import GenerationFailed
from pcontract.files import map_to_spec
from pcontract.fuzz import fuzz_generate
from pcontract.gapflow import compute_F
from pcontract.pipeline import analyze


def test_deterministic():
    assert map_to_spec(fuzz_generate(4, 3)) == map_to_spec(fuzz_generate(4, 3))
    assert map_to_spec(fuzz_generate(4, 3)) != map_to_spec(fuzz_generate(4, 4))


@pytest.mark.parametrize("seed", range(10))
def test_single_piece_orbit_is_its_fixed_point(seed):
    f = fuzz_generate(1, seed)
    (p,) = f.pieces
    fixed = p.intercept / (1 - p.slope)
    expected = [[fixed]] if fixed in p.domain else []
    assert [r.points for r in enumerate_periodic_orbits(f, 24)] == expected


def test_examples():
    f = fuzz_generate(2, 7)
    v = analyze(f, evidence=False).verdict
    assert v.m + v.d <= 2
    g = fuzz_generate(5, 11)
    assert g.n == 5 and compute_F(g).r <= 10


def test_flavours():
    inc = fuzz_generate(4, 1, increasing=True, left_closed=True)
    assert all(p.slope > 0 and p.domain.lo_closed and not p.domain.hi_closed for p in inc.pieces)
    planted = [fuzz_generate(3, s, plant=True) for s in range(30)]
    assert all(validate(f).ok for f in planted)
    degenerate = sum(any(r.kind is Kind.DEGENERATE for r in enumerate_periodic_orbits(f, 8)) for f in planted)
    assert degenerate > 0


def test_left_ownership_appears():
    owners = [fuzz_generate(3, s).owner(i) for s in range(20) for i in (1, 2)]
    assert "left" in owners and "right" in owners


def test_bad_arguments():
    with pytest.raises(ValueError):
        fuzz_generate(0, 1)
    with pytest.raises(GenerationFailed):
        fuzz_generate(6, 1, retries=0)
