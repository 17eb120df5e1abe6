"""Signed rotation systems on the real projective plane.

A connected piece of an arrangement is a :class:`Component`: 4-valent
vertices carrying a cyclic order of half-edges, half-edges paired into
edges, and an edge sign (``-1`` where the local orientation flips).
Crossing-free branches are loop components without vertices.  Components
are glued together by a containment forest: every component except the
top-level ones sits in a face of another component.

Flags are encoded as ``2*h + b`` where ``b == 0`` is the side of half-edge
``h`` facing the next half-edge of the rotation and ``b == 1`` the side
facing the previous one.  Faces are the orbits of the corner and edge-end
involutions on flags, which makes every face computation gauge-free.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .errors import ChiMismatch, CurveMismatch, DanglingContainment, NonTransverseVertex

ROOT = (-1, 0)


@dataclass(frozen=True)
class Curve:
    label: str
    degree: int
    rank: Optional[int] = None
    type: Optional[str] = None  # "I", "II" or None when unknown
    nodal: bool = False

    @property
    def genus(self) -> int:
        return (self.degree - 1) * (self.degree - 2) // 2


@dataclass(frozen=True)
class Component:
    """One connected piece of the union of curves.

    ``rot[v]`` lists the half-edges around vertex ``v``; opposite entries
    belong to the same strand.  A loop component has no vertices and stores
    its branch in ``loop``; ``twisted`` marks a one-sided loop.
    ``outer`` is the face of a two-sided component that contains the rest
    of the plane (the face that is not a disk).
    """

    rot: tuple = ()
    pair: tuple = ()
    sign: tuple = ()
    branch: tuple = ()
    loop: Optional[str] = None
    twisted: bool = False
    outer: Optional[int] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    # -- local structure -------------------------------------------------
    @property
    def is_loop(self) -> bool:
        return self.loop is not None

    @property
    def n_half(self) -> int:
        return len(self.pair)

    def _positions(self):
        pos = self._cache.get("pos")
        if pos is None:
            vert = [0] * self.n_half
            idx = [0] * self.n_half
            for v, cyc in enumerate(self.rot):
                for i, h in enumerate(cyc):
                    vert[h] = v
                    idx[h] = i
            pos = (tuple(vert), tuple(idx))
            self._cache["pos"] = pos
        return pos

    def vertex_of(self, h: int) -> int:
        return self._positions()[0][h]

    def next(self, h: int) -> int:
        vert, idx = self._positions()
        cyc = self.rot[vert[h]]
        return cyc[(idx[h] + 1) % len(cyc)]

    def prev(self, h: int) -> int:
        vert, idx = self._positions()
        cyc = self.rot[vert[h]]
        return cyc[(idx[h] - 1) % len(cyc)]

    def opposite(self, h: int) -> int:
        vert, idx = self._positions()
        cyc = self.rot[vert[h]]
        return cyc[(idx[h] + 2) % 4]

    # -- flag involutions ------------------------------------------------
    def corner(self, f: int) -> int:
        h, b = divmod(f, 2)
        return 2 * self.next(h) + 1 if b == 0 else 2 * self.prev(h)

    def edge_end(self, f: int) -> int:
        h, b = divmod(f, 2)
        m = self.pair[h]
        return 2 * m + (1 - b if self.sign[h] > 0 else b)

    @staticmethod
    def swap(f: int) -> int:
        return f ^ 1

    # -- cells -----------------------------------------------------------
    def face_orbits(self) -> tuple:
        """Face flag orbits, ordered by smallest flag; each orbit starts at it."""
        faces = self._cache.get("faces")
        if faces is not None:
            return faces
        if self.is_loop:
            faces = ((0,), (1,)) if not self.twisted else ((0,),)
        else:
            seen = [False] * (2 * self.n_half)
            out = []
            for f0 in range(2 * self.n_half):
                if seen[f0]:
                    continue
                orbit = []
                f = f0
                while not seen[f]:
                    seen[f] = True
                    orbit.append(f)
                    g = self.corner(f)
                    seen[g] = True
                    orbit.append(g)
                    f = self.edge_end(g)
                out.append(tuple(orbit))
            faces = tuple(out)
        self._cache["faces"] = faces
        return faces

    def face_of_flag(self, f: int) -> int:
        table = self._cache.get("face_of")
        if table is None:
            table = {}
            for i, orbit in enumerate(self.face_orbits()):
                for g in orbit:
                    table[g] = i
            self._cache["face_of"] = table
        return table[f]

    def face_edges(self, i: int) -> list:
        """Half-edges met along the boundary walk of face ``i`` (one per side)."""
        if self.is_loop:
            return [0]
        return [g // 2 for g in self.face_orbits()[i][0::2]]

    def edges(self) -> list:
        return [h for h in range(self.n_half) if h < self.pair[h]]

    @property
    def n_vertices(self) -> int:
        return len(self.rot)

    def euler(self) -> int:
        if self.is_loop:
            return 1 if self.twisted else 2
        return self.n_vertices - self.n_half // 2 + len(self.face_orbits())

    def orientation_gauge(self):
        """Vertex orientations making every edge positive, or None if one-sided."""
        key = "gauge"
        if key in self._cache:
            return self._cache[key]
        if self.is_loop:
            res = None if self.twisted else ()
            self._cache[key] = res
            return res
        vert = self._positions()[0]
        orient = [0] * self.n_vertices
        res = None
        ok = True
        for start in range(self.n_vertices):
            if orient[start]:
                continue
            orient[start] = 1
            stack = [start]
            while stack and ok:
                v = stack.pop()
                for h in self.rot[v]:
                    w = vert[self.pair[h]]
                    want = orient[v] * self.sign[h]
                    if orient[w] == 0:
                        orient[w] = want
                        stack.append(w)
                    elif orient[w] != want:
                        ok = False
                        break
        if ok:
            res = tuple(orient)
        self._cache[key] = res
        return res

    @property
    def one_sided(self) -> bool:
        return self.orientation_gauge() is None

    # -- strands -----------------------------------------------------------
    def strands(self) -> dict:
        """Branch label -> list of half-edges met walking once along it.

        The list holds the outgoing half-edge at each vertex passage.
        """
        got = self._cache.get("strands")
        if got is not None:
            return got
        out = {}
        if not self.is_loop:
            used = set()
            for h0 in range(self.n_half):
                if h0 in used:
                    continue
                walk = []
                h = h0
                while h not in used:
                    used.add(h)
                    walk.append(h)
                    m = self.pair[h]
                    used.add(m)
                    h = self.opposite(m)
                b = self.branch[h0]
                out.setdefault(b, []).append(walk)
        self._cache["strands"] = out
        return out

    def strand_sign(self, walk) -> int:
        s = 1
        for h in walk:
            s *= self.sign[h]
        return s


def make_loop(branch: str, twisted: bool = False) -> Component:
    return Component(loop=branch, twisted=twisted, outer=None if twisted else 1)


def make_component(rot, pair, sign, branch, outer=None) -> Component:
    """Build a vertex component and fill in the outer face when omitted."""
    rot = tuple(tuple(c) for c in rot)
    c = Component(rot=rot, pair=tuple(pair), sign=tuple(sign), branch=tuple(branch))
    if c.one_sided:
        return c
    if outer is None:
        raise ChiMismatch("two-sided component needs an outer face")
    return Component(rot=rot, pair=c.pair, sign=c.sign, branch=c.branch, outer=outer)


def validate_component(c: Component) -> None:
    if c.is_loop:
        return
    n = c.n_half
    seen = set()
    for v, cyc in enumerate(c.rot):
        if len(cyc) != 4:
            raise NonTransverseVertex(f"vertex {v} has degree {len(cyc)}")
        for h in cyc:
            if h in seen or not 0 <= h < n:
                raise ChiMismatch(f"half-edge {h} listed twice or out of range")
            seen.add(h)
        if c.branch[cyc[0]] != c.branch[cyc[2]] or c.branch[cyc[1]] != c.branch[cyc[3]]:
            raise NonTransverseVertex(f"vertex {v}: strands do not alternate")
    if len(seen) != n or len(c.sign) != n or len(c.branch) != n:
        raise ChiMismatch("half-edge tables have inconsistent sizes")
    for h in range(n):
        m = c.pair[h]
        if m == h or c.pair[m] != h:
            raise ChiMismatch(f"pairing is not a fixed-point-free involution at {h}")
        if c.sign[h] != c.sign[m] or c.sign[h] not in (1, -1):
            raise ChiMismatch(f"bad sign on edge {h}")
        if c.branch[h] != c.branch[m]:
            raise NonTransverseVertex(f"edge {h} changes branch")
    # connectivity
    vert = c._positions()[0]
    reach = {0} if c.rot else set()
    stack = list(reach)
    while stack:
        v = stack.pop()
        for h in c.rot[v]:
            w = vert[c.pair[h]]
            if w not in reach:
                reach.add(w)
                stack.append(w)
    if len(reach) != c.n_vertices:
        raise DanglingContainment("component is not connected")
    want = 1 if c.one_sided else 2
    if c.euler() != want:
        raise ChiMismatch(f"component has V-E+F = {c.euler()}, expected {want}")
    if not c.one_sided and (c.outer is None or not 0 <= c.outer < len(c.face_orbits())):
        raise ChiMismatch("two-sided component lacks a valid outer face")


@dataclass(frozen=True)
class Arrangement:
    """Components plus containment; ``parent[i]`` is ``(component, face)`` or None."""

    components: tuple
    parent: tuple
    curves: Mapping[str, Curve]
    branches: Mapping[str, str]
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    # -- branch level ------------------------------------------------------
    def curve_of(self, branch: str) -> str:
        return self.branches[branch]

    def branches_of(self, curve: str) -> list:
        return sorted(b for b, c in self.branches.items() if c == curve)

    def locate(self, branch: str) -> int:
        """Index of the component carrying ``branch``."""
        table = self._cache.get("locate")
        if table is None:
            table = {}
            for i, c in enumerate(self.components):
                if c.is_loop:
                    table[c.loop] = i
                else:
                    for b in set(c.branch):
                        table[b] = i
            self._cache["locate"] = table
        return table[branch]

    def root_component(self):
        for i, c in enumerate(self.components):
            if self.parent[i] is None and c.one_sided:
                return i
        return None

    # -- regions -------------------------------------------------------------
    def region_of(self, ci: int, fi: int):
        """Region id of face ``fi`` of component ``ci`` (outer faces merge upward)."""
        while True:
            c = self.components[ci]
            if c.outer is None or fi != c.outer:
                return (ci, fi)
            p = self.parent[ci]
            if p is None:
                return ROOT
            ci, fi = p

    def regions(self) -> list:
        got = self._cache.get("regions")
        if got is None:
            got = []
            if self.root_component() is None:
                got.append(ROOT)
            for ci, c in enumerate(self.components):
                for fi in range(len(c.face_orbits())):
                    if c.outer is None or fi != c.outer:
                        got.append((ci, fi))
            self._cache["regions"] = got
        return got

    def children(self, region) -> list:
        table = self._cache.get("children")
        if table is None:
            table = {}
            for i, p in enumerate(self.parent):
                key = ROOT if p is None else p
                if p is None and self.components[i].one_sided:
                    continue
                table.setdefault(key, []).append(i)
            self._cache["children"] = table
        return table.get(region, [])

    def region_chi(self, region) -> int:
        return 1 - len(self.children(region))

    def flag_region(self, ci: int, f: int):
        c = self.components[ci]
        return self.region_of(ci, c.face_of_flag(f) if not c.is_loop else f % 2)

    def edge_regions(self, ci: int, h: int):
        """Regions on the two sides of edge ``h`` of component ``ci``."""
        c = self.components[ci]
        if c.is_loop:
            if c.twisted:
                r = self.region_of(ci, 0)
                return r, r
            return self.region_of(ci, 0), self.region_of(ci, 1)
        return self.flag_region(ci, 2 * h), self.flag_region(ci, 2 * h + 1)

    def euler(self) -> int:
        chi = sum(self.region_chi(r) for r in self.regions())
        for c in self.components:
            if not c.is_loop:
                chi += c.n_vertices - c.n_half // 2
        return chi

    # -- vertices --------------------------------------------------------------
    def crossings(self):
        """Yield ``(component, vertex, branch_a, branch_b)`` for every crossing."""
        for ci, c in enumerate(self.components):
            for v, cyc in enumerate(c.rot):
                yield ci, v, c.branch[cyc[0]], c.branch[cyc[1]]


def build(components: Iterable[Component], parent: Iterable, curves, branches) -> Arrangement:
    """Validate and assemble an arrangement.

    Children placed in the outer face of a two-sided component are moved to
    that component's own placement.
    """
    components = tuple(components)
    parent = list(parent)
    if isinstance(curves, Mapping):
        curves = dict(curves)
    else:
        curves = {c.label: c for c in curves}
    branches = dict(branches)
    if len(parent) != len(components):
        raise DanglingContainment("parent table length differs from component count")
    for c in components:
        validate_component(c)
    n = len(components)
    for i, p in enumerate(parent):
        if p is None:
            continue
        j, f = p
        if not 0 <= j < n or j == i:
            raise DanglingContainment(f"component {i} placed in missing component {j}")
        if not 0 <= f < len(components[j].face_orbits()):
            raise DanglingContainment(f"component {i} placed in missing face {j}:{f}")
        if components[i].one_sided:
            raise DanglingContainment(f"one-sided component {i} cannot be nested")
    # acyclic
    for i in range(n):
        seen = set()
        j = i
        while parent[j] is not None:
            if j in seen:
                raise DanglingContainment("containment has a cycle")
            seen.add(j)
            j = parent[j][0]
    tops_one_sided = [i for i in range(n) if parent[i] is None and components[i].one_sided]
    if len(tops_one_sided) > 1:
        raise ChiMismatch("more than one one-sided component")
    if tops_one_sided:
        r = tops_one_sided[0]
        for i in range(n):
            if parent[i] is None and i != r:
                raise DanglingContainment(f"component {i} must lie in a face of the one-sided component")
    # normalise placement in outer faces
    changed = True
    while changed:
        changed = False
        for i, p in enumerate(parent):
            if p is not None and components[p[0]].outer == p[1]:
                parent[i] = parent[p[0]]
                changed = True
    # curves
    seen_branches = set()
    for c in components:
        bs = {c.loop} if c.is_loop else set(c.branch)
        for b in bs:
            if b not in branches:
                raise CurveMismatch(f"branch {b} has no curve")
            if b in seen_branches:
                raise CurveMismatch(f"branch {b} appears in two components")
            seen_branches.add(b)
    for b, cl in branches.items():
        if cl not in curves:
            raise CurveMismatch(f"branch {b} refers to unknown curve {cl}")
        if b not in seen_branches:
            raise CurveMismatch(f"branch {b} is declared but not drawn")
    for c in components:
        for ci_v, cyc in enumerate(c.rot):
            a, b = c.branch[cyc[0]], c.branch[cyc[1]]
            ca, cb = branches[a], branches[b]
            if ca == cb and not curves[ca].nodal:
                raise NonTransverseVertex(f"curve {ca} crosses itself but is not nodal")
    arr = Arrangement(components, tuple(parent), curves, branches)
    for cl, curve in curves.items():
        owned = arr.branches_of(cl)
        odd = sum(homology_class(arr, b) for b in owned)
        if not curve.nodal and odd != curve.degree % 2:
            raise CurveMismatch(f"curve {cl} of degree {curve.degree} has {odd} one-sided branches")
        if curve.rank is not None and not curve.nodal:
            if len(owned) != curve.genus + 1 - curve.rank:
                raise CurveMismatch(
                    f"curve {cl}: {len(owned)} branches but an (M-{curve.rank})-curve of degree "
                    f"{curve.degree} has {curve.genus + 1 - curve.rank}")
    chi = arr.euler()
    if chi != 1:
        raise ChiMismatch(f"assembled Euler characteristic is {chi}")
    return arr


def drop_components(arr: Arrangement, drop, curves=None) -> Arrangement:
    """Remove components; whatever they contained moves to their own placement."""
    drop = set(drop)
    keep = [i for i in range(len(arr.components)) if i not in drop]
    new_index = {old: new for new, old in enumerate(keep)}
    parent = []
    for i in keep:
        p = arr.parent[i]
        while p is not None and p[0] in drop:
            p = arr.parent[p[0]]
        parent.append(None if p is None else (new_index[p[0]], p[1]))
    comps = [arr.components[i] for i in keep]
    drawn = set()
    for c in comps:
        drawn |= {c.loop} if c.is_loop else set(c.branch)
    branches = {b: cl for b, cl in arr.branches.items() if b in drawn}
    curves = dict(arr.curves if curves is None else curves)
    used = set(branches.values())
    return build(comps, parent, {k: v for k, v in curves.items() if k in used}, branches)


def homology_class(arr: Arrangement, branch: str) -> int:
    """0 for a contractible branch, 1 for a one-sided one."""
    c = arr.components[arr.locate(branch)]
    if c.is_loop:
        return int(c.twisted)
    s = 1
    for walk in c.strands()[branch]:
        s *= c.strand_sign(walk)
    return 0 if s > 0 else 1


def crossing_count(arr: Arrangement, a: str, b: str) -> int:
    if a == b:
        raise ValueError("crossing_count needs two distinct branches")
    n = 0
    for _, _, x, y in arr.crossings():
        if {x, y} == {a, b}:
            n += 1
    return n


def branch_crossings(arr: Arrangement, branch: str) -> int:
    """Crossings of ``branch`` with all other branches (self-nodes counted twice)."""
    n = 0
    for _, _, x, y in arr.crossings():
        if x == branch and y == branch:
            n += 2
        elif branch in (x, y):
            n += 1
    return n


@dataclass(frozen=True)
class Face:
    region: tuple
    walk: tuple  # boundary flags of the owning component face
    chi: int
    holes: int
    kind: str  # "disk", "mobius", "annulus", ...


def faces(arr: Arrangement) -> list:
    out = []
    for r in arr.regions():
        h = len(arr.children(r))
        chi = 1 - h
        if r == ROOT:
            kind = "plane" if h == 0 else ("mobius" if h == 1 else "punctured-mobius")
            walk = ()
        else:
            c = arr.components[r[0]]
            walk = c.face_orbits()[r[1]]
            kind = "disk" if h == 0 else ("annulus" if h == 1 else "punctured-disk")
        out.append(Face(r, walk, chi, h, kind))
    return out


@dataclass(frozen=True)
class DualArc:
    a: tuple
    b: tuple
    component: int
    half_edge: int
    branch: str
    curve: str
    twist: int  # Z/2 homology increment


def _reference_cycle(c: Component) -> dict:
    """Edge multiplicities mod 2 of a one-sided cycle in ``c``."""
    vert = c._positions()[0]
    orient = {0: 1}
    via = {0: None}
    order = [0]
    for v in order:
        for h in c.rot[v]:
            w = vert[c.pair[h]]
            if w not in orient:
                orient[w] = orient[v] * c.sign[h]
                via[w] = c.pair[h]
                order.append(w)
    for v in order:
        for h in c.rot[v]:
            w = vert[c.pair[h]]
            if orient[w] != orient[v] * c.sign[h]:
                cyc = {}

                def walk_up(x):
                    while via[x] is not None:
                        e = min(via[x], c.pair[via[x]])
                        cyc[e] = cyc.get(e, 0) ^ 1
                        x = vert[c.pair[via[x]]]

                walk_up(v)
                walk_up(w)
                e = min(h, c.pair[h])
                cyc[e] = cyc.get(e, 0) ^ 1
                return cyc
    raise AssertionError("component is two-sided")


@dataclass(frozen=True)
class DualGraph:
    nodes: list
    arcs: list
    crosscap: Optional[tuple]  # region holding the cross-cap when no branch is one-sided


def dual_graph(arr: Arrangement) -> DualGraph:
    """Regions joined by one arc per edge of the arrangement.

    Each arc carries its Z/2 homology increment: the parity of its crossing
    with a fixed one-sided cycle.  With no one-sided branch, the cross-cap
    lives in the top region and a walk may pass it freely, flipping the class.
    """
    got = arr._cache.get("dual")
    if got is not None:
        return got
    r = arr.root_component()
    ref = {}
    if r is not None:
        c = arr.components[r]
        ref = {} if c.is_loop else _reference_cycle(c)
    arcs = []
    for ci, c in enumerate(arr.components):
        if c.is_loop:
            a, b = arr.edge_regions(ci, 0)
            arcs.append(DualArc(a, b, ci, 0, c.loop, arr.branches[c.loop], int(c.twisted)))
            continue
        for h in c.edges():
            a, b = arr.edge_regions(ci, h)
            tw = ref.get(h, 0) if ci == r else 0
            arcs.append(DualArc(a, b, ci, h, c.branch[h], arr.branches[c.branch[h]], tw))
    got = DualGraph(list(arr.regions()), arcs, None if r is not None else ROOT)
    arr._cache["dual"] = got
    return got
