import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from snakecoil import canon, codec, perturb

from support import brute_isomorphic, corpus, raw_outputs, represent

K2 = "base k=2; word {w}; branch a oval arcs (a1-a2 out)(a2-a3 in)(a3-a4 out)(a4-a1 in)"


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(0, 10 ** 4))
def test_invariant_under_presentation(seed, pick):
    items = corpus()
    arr = items[pick % len(items)]
    assert canon.canonical_form(represent(arr, random.Random(seed))) == canon.canonical_form(arr)


@pytest.mark.parametrize("i", range(len(corpus())))
def test_mirror_identified(i):
    arr = corpus()[i]
    mirrored = represent(arr, random.Random(i), mirror=True)
    assert canon.is_isotopic(arr, mirrored)
    assert brute_isomorphic(arr, mirrored)


def test_chiral_refines():
    items = [a for _, _, a in raw_outputs()]
    for x, y in itertools.combinations(items, 2):
        if canon.is_isotopic(x, y, chiral=True):
            assert canon.is_isotopic(x, y)


def test_rotated_word():
    a = codec.compile_base(codec.parse_base(K2.format(w="a1 a2 a3 a4")))
    b = codec.compile_base(codec.parse_base(K2.format(w="a2 a3 a4 a1")))
    assert canon.is_isotopic(a, b)


def _k4(place):
    text = ("base k=4; curve C degree=4 rank=0 type=I; word a1 a2 a3 a4 a5 a6 a7 a8; "
            "branch a oval arcs (a1-a2 in)(a2-a3 out)(a3-a4 in)(a4-a5 out)(a5-a6 in)(a6-a7 out)(a7-a8 in)(a8-a1 out); "
            "branch b oval free; branch c oval free; branch d oval free; "
            f"place b in gap {place[0]} out; place c in gap {place[1]} out; place d in gap {place[2]} out")
    return codec.compile_base(codec.parse_base(text))


def test_free_ovals_in_different_regions_differ():
    one = perturb.snake_from_conic(_k4((2, 2, 2)), 2)
    two = perturb.snake_from_conic(_k4((1, 1, 1)), 2)
    assert not canon.is_isotopic(one, two)
    assert not brute_isomorphic(one, two)


def _oracle_classes(items):
    reps = []
    for a in items:
        if not any(brute_isomorphic(a, r) for r in reps):
            reps.append(a)
    return len(reps)


@pytest.mark.parametrize("k", ["k2", "k3"])
def test_dedupe_matches_pairwise_oracle(k):
    items = [a for n, _, a in raw_outputs() if n.startswith(k)]
    kept, merge = canon.dedupe(items)
    assert len(kept) == _oracle_classes(items)
    for i, a in enumerate(items):
        assert brute_isomorphic(a, kept[merge[i]])


def test_dedupe_idempotent_and_order_free():
    items = [a for _, _, a in raw_outputs()]
    kept, _ = canon.dedupe(items)
    again, _ = canon.dedupe(kept)
    assert len(again) == len(kept)
    shuffled = items[:]
    random.Random(5).shuffle(shuffled)
    other, _ = canon.dedupe(shuffled)
    assert {canon.canonical_form(a) for a in other} == {canon.canonical_form(a) for a in kept}
