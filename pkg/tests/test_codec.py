import glob
import os
import random

import pytest
from hypothesis import given, settings, strategies as st

from snakecoil import canon, codec, curves, perturb, restrict
from snakecoil.errors import (AmbiguousEmbedding, InvalidWord, NonTransverseVertex, ParseError)

from support import GRAMMAR, bases, corpus, raw_outputs, represent

TWO_CONICS = "base k=2; word a1 a2 a3 a4; branch a oval arcs (a1-a2 out)(a2-a3 in)(a3-a4 out)(a4-a1 in)"


def test_one_line_base():
    arr = codec.compile_base(codec.parse_base(TWO_CONICS))
    assert sum(1 for _ in arr.crossings()) == 4
    assert canon.is_isotopic(arr, bases()["k2"])


@pytest.mark.parametrize("text, exc, pos", [
    ("base k=2; word a1 a2 a3 a4; branch a oval arcs (a1-a2 out)(a2-a3", ParseError, (1, 65)),
    ("base k=2; word a1 a2 a3 a4 a5; branch a oval arcs (a1-a2 out)", InvalidWord, (1, 11)),
    ("", ParseError, (1, 1)),
    ("base k=x", ParseError, (1, 6)),
    ("base k=2; word a1 a2 a3 a4; frob", ParseError, (1, 29)),
])
def test_base_errors(text, exc, pos):
    with pytest.raises(exc) as info:
        codec.compile_base(codec.parse_base(text))
    assert (info.value.line, info.value.col) == pos


def test_crossing_chords():
    text = "base k=2; word a1 b1 a2 b2; branch a oval arcs (a1-a2 in)(a2-a1 out); branch b oval arcs (b1-b2 in)(b2-b1 out)"
    with pytest.raises(NonTransverseVertex):
        codec.compile_base(codec.parse_base(text))


def test_ambiguous_sides():
    text = ("base k=4; word a1 a2 b1 b2 c1 c2 d1 d2; "
            + "; ".join(f"branch {b} oval arcs ({b}2-{b}1 in)({b}1-{b}2 out?)" for b in "abcd"))
    with pytest.raises(AmbiguousEmbedding):
        codec.compile_base(codec.parse_base(text))


def test_free_oval_adds_a_node():
    plain = codec.compile_base(codec.parse_base(TWO_CONICS))
    more = codec.compile_base(codec.parse_base(TWO_CONICS + "; branch o oval free; place o in gap 1 out"))
    assert len(more.components) == len(plain.components) + 1
    assert more.parent[more.locate("o")] is not None or more.root_component() is None


def test_empty_map():
    with pytest.raises(ParseError):
        codec.parse_map("")


@pytest.mark.parametrize("i", range(len(corpus())))
def test_round_trip_corpus(i):
    arr = corpus()[i]
    text = codec.serialize(arr)
    back = codec.parse_map(text)
    assert canon.canonical_form(back) == canon.canonical_form(arr)
    assert codec.serialize(back) == text


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 200))
def test_round_trip_random_presentations(seed, pick):
    items = corpus()
    arr = represent(items[pick % len(items)], random.Random(seed))
    back = codec.parse_map(codec.serialize(arr))
    assert canon.canonical_form(back) == canon.canonical_form(arr)


def _fixtures(pattern):
    return sorted(glob.glob(os.path.join(GRAMMAR, pattern)))


def _parse(path, text):
    if path.endswith(".base"):
        return codec.compile_base(codec.parse_base(text))
    return codec.parse_map(text)


@pytest.mark.parametrize("path", [p for p in _fixtures("*") if ".bad" not in p], ids=os.path.basename)
def test_grammar_fixture_parses(path):
    _parse(path, open(path).read())


@pytest.mark.parametrize("path", _fixtures("*.bad*"), ids=os.path.basename)
def test_grammar_twin_position(path):
    text = open(path).read()
    line, col = map(int, text.splitlines()[0].split()[-1].split(":"))
    with pytest.raises(ParseError) as info:
        _parse(path, text)
    assert (info.value.line, info.value.col) == (line, col)


def _witness(arr):
    return curves.detect_snake(arr, perturb.SNAKE_BRANCH, codec.OTHER)


def test_snake_code_k2():
    _, _, arr = raw_outputs()[0]
    assert codec.snake_code(arr, _witness(arr)) == "12367854"


@pytest.mark.parametrize("i", range(len(raw_outputs())))
def test_snake_code_presentation_invariant(i):
    _, _, arr = raw_outputs()[i]
    code = codec.snake_code(arr, _witness(arr))
    rng = random.Random(i)
    for _ in range(5):
        other = represent(arr, rng)
        w = curves.detect_snake(other, other_snake(other), codec.OTHER)
        assert codec.snake_code(other, w) == code


def other_snake(arr):
    (name,) = [b for b in arr.branches_of("S") if not arr.components[arr.locate(b)].is_loop]
    return name


def test_snake_code_blind_to_free_ovals():
    # one free oval of the quartic moved into the snake: same code, different type
    arr = next(a for n, g, a in raw_outputs() if n == "k4a")
    w = _witness(arr)
    moved = restrict.move_inside_snake(arr, w, "b")
    assert codec.snake_code(moved, _witness(moved)) == codec.snake_code(arr, w)
    assert not canon.is_isotopic(moved, arr)
