import pytest

from snakecoil import codec, core
from snakecoil.curves import bezout_audit
from snakecoil.errors import ChiMismatch, CurveMismatch, DanglingContainment

from support import bases, corpus


def two_conics():
    return bases()["k2"]


def test_two_conics_faces():
    arr = two_conics()
    fs = core.faces(arr)
    # four crossings of two ovals: four lenses, the common part and the rest
    assert len(fs) == 6
    assert sorted(f.kind for f in fs) == ["disk"] * 5 + ["mobius"]
    assert sum(1 for _ in arr.crossings()) == 4
    assert arr.euler() == 1


@pytest.mark.parametrize("i", range(len(corpus())))
def test_euler_characteristic_is_one(i):
    arr = corpus()[i]
    total = sum(arr.region_chi(r) for r in arr.regions())
    for c in arr.components:
        if not c.is_loop:
            total += c.n_vertices - c.n_half // 2
    assert total == 1 == arr.euler()


def test_empty_arrangement():
    arr = core.build([], [], {}, {})
    assert arr.euler() == 1
    assert len(core.faces(arr)) == 1


def test_single_oval_and_pseudoline():
    oval = core.build([core.make_loop("o")], [None], {"C": core.Curve("C", 2, 0, "I")}, {"o": "C"})
    assert sorted(f.kind for f in core.faces(oval)) == ["disk", "mobius"]
    line = core.build([core.make_loop("l", twisted=True)], [None], {"L": core.Curve("L", 1, 0, "I")}, {"l": "L"})
    assert [f.kind for f in core.faces(line)] == ["disk"]
    assert core.homology_class(line, "l") == 1


def test_two_disjoint_pseudolines_rejected():
    text = ("armap 1\ncurve L degree=1\ncurve M degree=1\nbranch x L\nbranch y M\n"
            "loop 0 x pseudoline\nloop 1 y pseudoline\nend\n")
    with pytest.raises(ChiMismatch):
        codec.parse_map(text)


def test_sign_flips_caught():
    text = codec.serialize(two_conics())
    one = text.replace("e 1 13 + a", "e 1 13 - a")
    with pytest.raises(CurveMismatch):
        codec.parse_map(one)
    both = one.replace("e 0 6 + q", "e 0 6 - q").replace("type=I\n", "type=I nodal\n")
    with pytest.raises(ChiMismatch):
        codec.parse_map(both)


def test_dangling_parent():
    with pytest.raises(DanglingContainment):
        core.build([core.make_loop("o")], [(3, 0)], {"C": core.Curve("C", 2)}, {"o": "C"})


def test_homology_classes():
    cubic = bases()["k3a"]
    assert core.homology_class(cubic, "j") == 1
    assert core.homology_class(cubic, "o") == 0
    assert core.homology_class(cubic, "q") == 0


def test_bezout_saturated_on_bases():
    for name, arr in bases().items():
        (entry,) = bezout_audit(arr)
        assert entry.ok and entry.saturated, name


def test_drop_components_keeps_containment():
    arr = bases()["k4a"]
    ci = arr.locate("b")
    with pytest.raises(CurveMismatch):
        core.drop_components(arr, [ci])
    curves = dict(arr.curves)
    curves["C"] = core.Curve("C", 4, 1, "II")
    out = core.drop_components(arr, [ci], curves)
    assert "b" not in out.branches
    assert len(out.components) == len(arr.components) - 1
    assert out.euler() == 1


@pytest.mark.parametrize("i", range(len(corpus())))
def test_dual_twists_even_around_vertices(i):
    # the small loop around a crossing is contractible
    arr = corpus()[i]
    twist = {}
    for arc in core.dual_graph(arr).arcs:
        c = arr.components[arc.component]
        if not c.is_loop:
            twist[(arc.component, min(arc.half_edge, c.pair[arc.half_edge]))] = arc.twist
    for ci, c in enumerate(arr.components):
        if c.is_loop:
            continue
        for cyc in c.rot:
            assert sum(twist[(ci, min(h, c.pair[h]))] for h in cyc) % 2 == 0
