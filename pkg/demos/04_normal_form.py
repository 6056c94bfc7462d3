"""Conjugating a contraction to slopes +-1/2.

h is built from a measure that halves under f.  Its values are only known
inside rational enclosures, so the difference quotients come out as
intervals too.
"""

from pcontract import fixture
from pcontract.conjugacy import ConjugacyTable, verify_half_slopes

for name in ("map-g", "map-deg", "map-inc"):
    f = fixture(name)
    table = ConjugacyTable(f, 40)
    rep = verify_half_slopes(f, table, samples_per_piece=50)
    print(name, "h(breakpoints) in", ", ".join(f"[{float(e.lo):.6f}, {float(e.hi):.6f}]" for e in table.breakpoint_images()))
    for p in rep.pieces:
        print(f"    piece {p.piece + 1}: quotients in [{float(p.low):+.7f}, {float(p.high):+.7f}]")
