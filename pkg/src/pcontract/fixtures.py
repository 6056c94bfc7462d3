"""Named maps used throughout the tests, demos and CLI.

``TIGHT`` lists one map per piece count ``n = 1..4`` whose periodic orbits
exactly exhaust the bound ``m + d = n``.
"""

from __future__ import annotations

from gmpy2 import mpq

from .core import PiecewiseAffineContraction

q = mpq


def map_g() -> PiecewiseAffineContraction:
    """Orbits {3/7} and {1/54, 16/27}."""
    f = PiecewiseAffineContraction.from_breakpoints(
        [0, q(1, 2), 1], [q(-2, 5), q(1, 5)], [q(3, 5), q(-1, 10)], name="map-g"
    )
    f.notes = "fixed point 3/7 in (1/4, 1/2); 2-cycle 1/54 <-> 16/27"
    return f


def map_half() -> PiecewiseAffineContraction:
    return PiecewiseAffineContraction.from_breakpoints([0, 1], [q(1, 2)], [0], name="map-half")


def map_deg() -> PiecewiseAffineContraction:
    """3/4 is fixed but points just right of it are flung away: a degenerate orbit."""
    f = PiecewiseAffineContraction.from_breakpoints(
        [0, q(3, 4), 1], [q(1, 2), q(-1, 2)], [0, q(9, 8)], name="map-deg"
    )
    f.notes = "regular fixed point 0, degenerate fixed point 3/4"
    return f


def map_inc() -> PiecewiseAffineContraction:
    return PiecewiseAffineContraction.from_breakpoints(
        [0, q(1, 2), 1], [q(1, 2), q(1, 2)], [q(1, 8), q(7, 16)], name="map-inc"
    )


def tight_3() -> PiecewiseAffineContraction:
    f = PiecewiseAffineContraction.from_breakpoints(
        [0, q(1, 3), q(2, 3), 1],
        [q(1, 2), q(1, 4), q(-1, 2)],
        [0, q(5, 16), 1],
        name="tight-3",
    )
    f.notes = "regular fixed points 0 and 5/12, degenerate fixed point 2/3"
    return f


def tight_4() -> PiecewiseAffineContraction:
    # map-g squeezed onto [0, 1/2) next to a regular and a degenerate fixed point
    f = PiecewiseAffineContraction.from_breakpoints(
        [0, q(1, 4), q(1, 2), q(3, 4), 1],
        [q(-2, 5), q(1, 5), q(1, 4), q(-1, 2)],
        [q(3, 10), q(-1, 20), q(27, 64), q(9, 8)],
        name="tight-4",
    )
    f.notes = "fixed 3/14, 2-cycle 1/108 <-> 8/27, fixed 9/16, degenerate fixed 3/4"
    return f


FIXTURES = {
    "map-g": map_g,
    "map-half": map_half,
    "map-deg": map_deg,
    "map-inc": map_inc,
    "tight-3": tight_3,
    "tight-4": tight_4,
}

TIGHT = ["map-half", "map-g", "map-deg", "tight-3", "tight-4"]


def fixture(name: str) -> PiecewiseAffineContraction:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None
