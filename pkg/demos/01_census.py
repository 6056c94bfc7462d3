"""Periodic orbits of a two-piece contraction and the intervals that trap them."""

from pcontract import fixture
from pcontract.census import enumerate_periodic_orbits, trapping_region

f = fixture("map-g")
print(f)
print()

for rec in enumerate_periodic_orbits(f, 4):
    pts = ", ".join(str(p) for p in rec.points)
    print(f"period {rec.period}: {{{pts}}}  {rec.kind.value}")
    for comp in trapping_region(f, rec).components:
        print(f"    trapped by {comp.interval}")
