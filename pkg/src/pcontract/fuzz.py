"""Seeded random piecewise contractions."""

from __future__ import annotations

import random

from gmpy2 import mpq

from .core import PiecewiseAffineContraction, validate
from .errors import GenerationFailed


def _rng(n: int, seed: int, tag: str) -> random.Random:
    return random.Random(f"pcontract:{tag}:{n}:{seed}")


def _breakpoints(rng, n):
    xs = set()
    while len(xs) < n - 1:
        q = rng.randint(2, 16)
        p = rng.randint(1, q - 1)
        xs.add(mpq(p, q))
    return [mpq(0)] + sorted(xs) + [mpq(1)]


def _slope(rng, positive):
    q = rng.randint(2, 9)
    s = mpq(rng.randint(1, q - 1), q)
    return s if positive or rng.random() < 0.5 else -s


def _plant(rng, xs, slopes, intercepts, owners):
    # make one owned breakpoint a fixed point of its owning piece
    i = rng.randint(1, len(xs) - 2)
    p = i - 1 if owners[i - 1] == "left" else i
    intercepts[p] = xs[i] - slopes[p] * xs[i]


def _attempt(rng, n, increasing, left_closed, plant):
    xs = _breakpoints(rng, n)
    slopes = [_slope(rng, increasing) for _ in range(n)]
    if left_closed:
        owners = ["right"] * (n - 1)
    else:
        # left ownership gets extra weight: it is the least common form in hand-made maps
        owners = [rng.choice(["left", "left", "right"]) for _ in range(n - 1)]
    lengths = [abs(s) * (xs[i + 1] - xs[i]) for i, s in enumerate(slopes)]
    slack = 1 - sum(lengths)
    weights = [0 if rng.random() < 0.12 else rng.randint(1, 10) for _ in range(n + 1)]
    if not any(weights):
        weights[-1] = 1
    total = sum(weights)
    gaps = [slack * w / total for w in weights]
    order = list(range(n))
    rng.shuffle(order)
    intercepts = [None] * n
    y = gaps[0]
    for k, i in enumerate(order):
        a, b = xs[i], xs[i + 1]
        s = slopes[i]
        intercepts[i] = y - s * a if s > 0 else y - s * b
        y += lengths[i] + gaps[k + 1]
    if plant and n > 1:
        _plant(rng, xs, slopes, intercepts, owners)
    return PiecewiseAffineContraction.from_breakpoints(xs, slopes, intercepts, owners)


def fuzz_generate(
    n: int,
    seed: int,
    increasing: bool = False,
    left_closed: bool = False,
    plant: bool = False,
    retries: int = 1000,
) -> PiecewiseAffineContraction:
    """Deterministic random validated map with ``n`` pieces.

    Breakpoints and slopes have small denominators; the images are laid out
    in a random order with random (sometimes zero) gaps between them, and the
    intercepts are solved from that layout.  Layouts that fail validation
    (touching closed ends, continuity at a breakpoint, an image reaching 1)
    are redrawn.

    ``plant=True`` moves one piece so that a breakpoint it owns becomes a
    fixed point.  With a negative slope such a point is degenerate, which
    plain random layouts almost never produce.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    tag = ("inc" if increasing else "any") + ("-lc" if left_closed else "") + ("-plant" if plant else "")
    rng = _rng(n, seed, tag)
    for _ in range(retries):
        f = _attempt(rng, n, increasing, left_closed, plant)
        if validate(f).ok:
            f.name = f"fuzz-n{n}-s{seed}" + ("-" + tag if tag != "any" else "")
            return f
    raise GenerationFailed(f"no valid map for n={n}, seed={seed} after {retries} attempts")
