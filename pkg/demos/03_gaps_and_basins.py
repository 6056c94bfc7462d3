"""Gaps in the image, their forward layers, and which orbit each layer feeds."""

from pcontract import analyze, fixture
from pcontract.plot import plot

f = fixture("tight-4")
a = analyze(f, evidence=False)

print("gap set E:", ", ".join(str(e) for e in a.atlas.E))
print("exceptional points B:", [str(b) for b in a.atlas.B])
for c in a.captures:
    print(f"gap {c.gap_index + 1} -> orbit {c.orbit_index + 1} after {c.target_time} steps")
for m in a.manifolds:
    print(f"basin of orbit {m.orbit_index + 1}:", " ".join(str(iv) for iv in m.open_intervals))

# uncovered length after 60 layers, as an exact rational
print("uncovered <=", float(a.atlas.uncovered_bound(60)))

with open("tight-4-basins.svg", "w") as fh:
    fh.write(plot("basins", f, analysis=a))
print("wrote tight-4-basins.svg")
