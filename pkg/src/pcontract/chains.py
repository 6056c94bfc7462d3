"""Cyclic chains of integer pairs.

A sequence of pairs ``(a_0, b_0), ..., (a_{s-1}, b_{s-1})`` is an s-chain when
every pair contains the first coordinate of its predecessor, cyclically:
``a_l == a_{l-1}`` or ``b_l == a_{l-1}`` for ``l = 1 .. s`` with indices mod s.
Its coordinate set never has more than ``s + 1`` elements, and reaches that
size exactly when all ``a_l`` agree and ``a_0, b_0, ..., b_{s-1}`` are
pairwise distinct.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import BudgetExceeded, EmptyChain

Pair = tuple[int, int]


def _check(pairs: Sequence[Pair]) -> list[Pair]:
    pairs = [tuple(p) for p in pairs]
    if not pairs:
        raise EmptyChain("a chain needs at least one pair")
    for p in pairs:
        if len(p) != 2 or any(not isinstance(c, int) or c < 1 for c in p):
            raise ValueError(f"pair {p!r} must hold two positive integers")
    return pairs


def is_chain(pairs: Sequence[Pair]) -> bool:
    pairs = _check(pairs)
    s = len(pairs)
    for ell in range(1, s + 1):
        a, b = pairs[ell % s]
        prev = pairs[ell - 1][0]
        if a != prev and b != prev:
            return False
    return True


def coordinate_set(pairs: Sequence[Pair]) -> set[int]:
    return {c for p in _check(pairs) for c in p}


def is_extremal_shape(pairs: Sequence[Pair]) -> bool:
    """All first coordinates equal and ``a_0, b_0, ..., b_{s-1}`` pairwise distinct."""
    pairs = _check(pairs)
    a0 = pairs[0][0]
    if any(a != a0 for a, _ in pairs):
        return False
    coords = [a0] + [b for _, b in pairs]
    return len(set(coords)) == len(coords)


def iter_chains(s: int, alphabet: int) -> Iterator[tuple[Pair, ...]]:
    """Every s-chain over ``{1 .. alphabet}``, in lexicographic order of construction."""
    letters = range(1, alphabet + 1)

    def successors(prev_a):
        for c in letters:
            yield (prev_a, c)
        for c in letters:
            if c != prev_a:
                yield (c, prev_a)

    def extend(chain):
        if len(chain) == s:
            a, b = chain[0]
            last = chain[-1][0]
            if a == last or b == last:
                yield tuple(chain)
            return
        for nxt in successors(chain[-1][0]):
            chain.append(nxt)
            yield from extend(chain)
            chain.pop()

    for a in letters:
        for b in letters:
            yield from extend([(a, b)])


def chain_count_bound(s: int, alphabet: int) -> int:
    return alphabet * alphabet * (2 * alphabet - 1) ** (s - 1)


@dataclass
class VerificationReport:
    s_max: int
    alphabet: int
    chains: dict[int, int] = field(default_factory=dict)
    max_size: dict[int, int] = field(default_factory=dict)
    extremal: dict[int, int] = field(default_factory=dict)
    bound_violations: list = field(default_factory=list)
    characterization_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.bound_violations and not self.characterization_violations

    def to_json(self) -> dict:
        return {
            "s_max": self.s_max,
            "alphabet": self.alphabet,
            "chains": {str(k): v for k, v in self.chains.items()},
            "max_coordinate_count": {str(k): v for k, v in self.max_size.items()},
            "extremal_chains": {str(k): v for k, v in self.extremal.items()},
            "bound_violations": [list(map(list, c)) for c in self.bound_violations[:20]],
            "characterization_violations": [list(map(list, c)) for c in self.characterization_violations[:20]],
            "ok": self.ok,
        }


def verify_lemma(s_max: int = 5, alphabet_max: int = 7, budget: int = 5_000_000) -> VerificationReport:
    """Enumerate every chain with ``s <= s_max`` and check the size bound and its equality case."""
    total = sum(chain_count_bound(s, alphabet_max) for s in range(1, s_max + 1))
    if total > budget:
        raise BudgetExceeded(f"up to {total} candidate chains exceed the budget of {budget}")
    rep = VerificationReport(s_max, alphabet_max)
    for s in range(1, s_max + 1):
        count = top = eq = 0
        for ch in iter_chains(s, alphabet_max):
            count += 1
            size = len({c for p in ch for c in p})
            top = max(top, size)
            if size > s + 1:
                rep.bound_violations.append(ch)
            if (size == s + 1) != is_extremal_shape(ch):
                rep.characterization_violations.append(ch)
            eq += size == s + 1
        rep.chains[s] = count
        rep.max_size[s] = top
        rep.extremal[s] = eq
    return rep
