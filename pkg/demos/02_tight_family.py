"""Maps whose periodic orbits use up the whole budget of n.

A degenerate orbit counts against the budget as well, even though it
attracts nothing but itself.
"""

from pcontract import analyze, fixture
from pcontract.fixtures import TIGHT

for name in TIGHT:
    a = analyze(fixture(name))
    v = a.verdict
    ev = v.evidence
    print(f"{name:9s} n={v.n} regular={v.m} degenerate={v.d}  grid seeds settled: {ev.converged}/{ev.seeds}")
