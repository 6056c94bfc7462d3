"""Return maps of switched flows on polygons.

A particle crosses the polygon in a straight line; where it hits the
boundary a field picks its new direction.  The boundary-to-boundary map is
piecewise affine, and when it is contractive it goes straight into the census.
"""

from pcontract.billiard import extract_return_map, pinwheel_square, right_triangle, sample_agreement
from pcontract.census import enumerate_periodic_orbits

for scene in (right_triangle(), pinwheel_square()):
    ext = extract_return_map(scene)
    matches, total = sample_agreement(scene, ext)
    print(f"{scene.name}: {len(ext.pieces)} pieces, {matches}/{total} samples agree")
    for p in ext.pieces:
        print(f"    [{p.lo}, {p.hi}) slope {p.slope}")
    if ext.map is None:
        print("    not analysed:", "; ".join(ext.reasons))
        continue
    for rec in enumerate_periodic_orbits(ext.map, 12):
        print("    orbit", [str(x) for x in rec.points], rec.kind.value)
