import pytest

from snakecoil import codec, curves, perturb, restrict
from snakecoil.errors import ConditionsFail, GammaMismatch, OddDegreeUnion

from support import bases, corpus, raw_outputs


def witness(arr):
    return curves.detect_snake(arr, perturb.SNAKE_BRANCH, codec.OTHER)


def even():
    return [a for a in corpus() if restrict.total_degree(a) % 2 == 0]


def quartic_outputs():
    return [a for n, _, a in raw_outputs() if bases()[n].curves[codec.OTHER].degree == 4]


def n_vertices(arr):
    return sum(c.n_vertices for c in arr.components if not c.is_loop)


@pytest.mark.parametrize("i", range(len(even())))
def test_closed_sides_add_up(i):
    # the two closed sides overlap in the curves: chi = 1 + V - E = 1 - V
    arr = even()[i]
    colours = restrict._two_colour(arr)
    total = sum(restrict.chi_plus(arr, restrict.SideChoice(colours, x, True)) for x in (0, 1))
    assert total == 1 - n_vertices(arr)


def test_odd_degree_has_no_sides():
    with pytest.raises(OddDegreeUnion):
        restrict.side_choice(bases()["k3a"])


def even_outputs():
    return [a for _, _, a in raw_outputs() if restrict.total_degree(a) % 2 == 0]


@pytest.mark.parametrize("i", range(len(even_outputs())))
def test_congruence_reflexive(i):
    arr = even_outputs()[i]
    report = restrict.congruence_check(arr, arr)
    assert report.condition_I and report.condition_II
    assert report.passed


def test_condition_two_rejects_double_crossings():
    with pytest.raises(ConditionsFail):
        restrict.congruence_check(bases()["k4c"], bases()["k4c"])


def test_gamma_mismatch():
    a, b = quartic_outputs()[0], next(a for n, _, a in raw_outputs() if n == "k4c")
    with pytest.raises(GammaMismatch):
        restrict.congruence_check(a, b)


def test_absolute_mode_needs_q():
    arr = quartic_outputs()[0]
    with pytest.raises(ValueError):
        restrict.congruence_check(arr, mode="absolute")
    chi = restrict.chi_plus(arr)
    # k = 4 for the union of two quartics
    q = (chi - 16) % 8
    assert restrict.congruence_check(arr, q=q, mode="absolute").mod8_m is True
    assert restrict.congruence_check(arr, q=q + 2, mode="absolute").mod8_m is False


@pytest.mark.parametrize("i", range(len(quartic_outputs())))
def test_moving_an_oval_into_the_snake(i):
    arr = quartic_outputs()[i]
    w = witness(arr)
    before = restrict.chi_plus(arr)
    phi = restrict.phi_p_n(arr, w)[0]
    for b in curves.free_branches(arr, codec.OTHER):
        moved = restrict.move_inside_snake(arr, w, b)
        assert abs(restrict.chi_plus(moved) - before) == 2
        assert restrict.congruence_check(moved, arr).mod8_m is False
        # the balance chi - p + n does not see which side the oval is on
        assert restrict.phi_p_n(moved, witness(moved))[0] == phi


def test_snake_obstructions_absent_on_generated():
    for _, _, arr in raw_outputs():
        assert restrict.check_snake_obstructions(arr, witness(arr)) == []


def small():
    return [a for a in corpus() if n_vertices(a) <= 6]


@pytest.mark.parametrize("i", range(len(small())))
def test_line_search_matches_enumeration(i):
    arr = small()[i]
    for cv in sorted(arr.curves):
        for r in arr.regions():
            got = restrict.pseudoline_min_crossings(arr, [r], cv)
            assert got.crossings == restrict.brute_force_min_crossings(arr, [r], cv, max_len=10)


@pytest.mark.parametrize("i", range(len(corpus())))
def test_crossing_parity(i):
    # a closed walk of class h meets a curve of degree d a number of times = h*d mod 2
    arr = corpus()[i]
    for cv, c in sorted(arr.curves.items()):
        for r in arr.regions()[:4]:
            for h in (0, 1):
                value, _ = restrict.min_crossings(arr, [r], cv, homology=h)
                assert value is not None and value % 2 == (h * c.degree) % 2


def test_line_through_two_regions_at_least_through_one():
    arr = bases()["k4a"]
    rs = arr.regions()
    one = restrict.pseudoline_min_crossings(arr, [rs[1]], "C")
    two = restrict.pseudoline_min_crossings(arr, [rs[1], rs[-1]], "C")
    assert two.crossings >= one.crossings
    assert not one.obstructed


def test_pseudoconic_limits():
    arr = bases()["k2"]
    got = restrict.pseudoconic_min_crossings(arr, arr.regions()[:2], "C")
    assert got.bound == 4 and got.crossings % 2 == 0
    with pytest.raises(ValueError):
        restrict.pseudoconic_min_crossings(arr, arr.regions(), "C")


def test_pencil_certificate_shape():
    good = {"centre": [0, 0], "intervals": [[0, 0.5], [0.5, 1]], "maximal": [True, False]}
    assert restrict.validate_pencil_certificate(good) == []
    assert restrict.validate_pencil_certificate({"centre": 1}) != []
    bad = dict(good, intervals=[[0.6, 0.2]], maximal=[1])
    assert len(restrict.validate_pencil_certificate(bad)) == 2
