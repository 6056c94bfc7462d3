"""Random maps against the orbit bound."""

from collections import Counter

from pcontract import analyze
from pcontract.fuzz import fuzz_generate

for n in (2, 3, 4):
    counts = Counter()
    bad = 0
    for seed in range(100):
        a = analyze(fuzz_generate(n, seed), evidence=False)
        counts[a.verdict.m + a.verdict.d] += 1
        bad += bool(a.violations)
    print(f"n={n}: m+d histogram {dict(sorted(counts.items()))}, violations {bad}")
