from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pcontract.chains import coordinate_set, is_chain, is_extremal_shape, iter_chains, verify_lemma
from pcontract.errors import BudgetExceeded, EmptyChain


def test_is_chain_examples():
    assert is_chain([(1, 2), (1, 3), (4, 1), (2, 4)])
    assert not is_chain([(1, 2), (3, 4)])
    assert is_chain([(5, 9)])


def test_is_chain_errors():
    with pytest.raises(EmptyChain):
        is_chain([])
    with pytest.raises(ValueError):
        is_chain([(0, 1)])


def test_coordinate_set_examples():
    fan = [(1, ell + 2) for ell in range(3)]
    assert coordinate_set(fan) == {1, 2, 3, 4}
    assert len(coordinate_set([(1, 2), (1, 3), (4, 1), (2, 4)])) == 4
    assert coordinate_set([(7, 7)]) == {7}


def brute_chains(s, alphabet):
    pairs = list(product(range(1, alphabet + 1), repeat=2))
    return {c for c in product(pairs, repeat=s) if is_chain(c)}


@pytest.mark.parametrize("s,alphabet", [(1, 3), (2, 3), (3, 3), (2, 4)])
def test_enumeration_matches_brute_force(s, alphabet):
    assert set(iter_chains(s, alphabet)) == brute_chains(s, alphabet)


def test_verify_small_cases():
    rep = verify_lemma(2, 3)
    assert rep.ok and rep.max_size[2] == 3
    extremal = {c for c in brute_chains(2, 3) if len(coordinate_set(c)) == 3}
    assert extremal == {c for c in brute_chains(2, 3) if is_extremal_shape(c)}
    rep = verify_lemma(1, 5)
    assert rep.ok and rep.max_size[1] == 2


def test_verify_s4_alphabet6():
    rep = verify_lemma(4, 6)
    assert rep.ok
    assert rep.max_size == {1: 2, 2: 3, 3: 4, 4: 5}


def test_budget():
    with pytest.raises(BudgetExceeded):
        verify_lemma(5, 7, budget=1000)


pair = st.tuples(st.integers(1, 9), st.integers(1, 9))


@st.composite
def chains(draw):
    s = draw(st.integers(1, 8))
    first = draw(pair)
    out = [first]
    for _ in range(s - 1):
        prev = out[-1][0]
        other = draw(st.integers(1, 9))
        out.append((prev, other) if draw(st.booleans()) else (other, prev))
    last = out[-1][0]
    if first[0] != last and first[1] != last:
        out[0] = (first[0], last)
    return out


@given(chains())
def test_random_chains_respect_bound(c):
    assert is_chain(c)
    size = len(coordinate_set(c))
    assert size <= len(c) + 1
    assert (size == len(c) + 1) == is_extremal_shape(c)
