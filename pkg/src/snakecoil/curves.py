"""Curve-level semantics: snakes, sides of ovals, free branches, Bezout counts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import ROOT, Arrangement, dual_graph, homology_class
from .errors import NotAnOval


@dataclass(frozen=True)
class SnakeWitness:
    oval: str
    coiled: tuple  # branches of the other curve met by the oval
    quads: tuple  # regions inside the oval with four sides
    ends: tuple  # the two digon regions
    end_arcs: tuple  # (component, half-edge) of the oval edge bounding each end
    k: int


def oval_sides(arr: Arrangement, oval: str) -> tuple:
    """Regions on the disk side and on the Möbius side of ``oval``."""
    if homology_class(arr, oval):
        raise NotAnOval(f"branch {oval} is one-sided")
    g = dual_graph(arr)
    adj = {n: [] for n in g.nodes}
    for arc in g.arcs:
        if arc.branch == oval:
            continue
        adj[arc.a].append(arc.b)
        adj[arc.b].append(arc.a)
    start = g.nodes[0]
    side = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in side:
                side.add(y)
                stack.append(y)
    other = set(g.nodes) - side
    if not other:
        raise NotAnOval(f"branch {oval} does not separate the plane")
    if _side_chi(arr, side, oval) == 1:
        return side, other
    return other, side


def _side_chi(arr, side, oval) -> int:
    chi = sum(arr.region_chi(r) for r in side)
    for ci, c in enumerate(arr.components):
        if c.is_loop:
            continue
        for h in c.edges():
            if c.branch[h] != oval and arr.edge_regions(ci, h)[0] in side:
                chi -= 1
        for cyc in c.rot:
            if oval in (c.branch[cyc[0]], c.branch[cyc[1]]):
                continue
            if arr.flag_region(ci, 2 * cyc[0]) in side:
                chi += 1
    return chi


def region_walk(arr: Arrangement, region) -> list:
    """Branches met along the boundary of a hole-free region, in order."""
    if region == ROOT:
        return []
    ci, fi = region
    c = arr.components[ci]
    if c.is_loop:
        return [c.loop]
    return [c.branch[f // 2] for f in c.face_orbits()[fi][1::2]]


def detect_snake(arr: Arrangement, oval: str, other_curve: str) -> Optional[SnakeWitness]:
    disk, _ = oval_sides(arr, oval)
    ci = arr.locate(oval)
    c = arr.components[ci]
    if c.is_loop:
        return None
    quads, ends, coiled = [], [], set()
    for r in sorted(disk):
        if r == ROOT:
            return None
        if r[0] != ci:
            # free ovals nested in the disk do not change how it is cut
            if arr.components[r[0]].is_loop:
                continue
            return None
        walk = region_walk(arr, r)
        if len(walk) not in (2, 4):
            return None
        on_oval = [b == oval for b in walk]
        if any(on_oval[i] == on_oval[(i + 1) % len(walk)] for i in range(len(walk))):
            return None
        for b in walk:
            if b != oval:
                if arr.branches[b] != other_curve:
                    return None
                coiled.add(b)
        (ends if len(walk) == 2 else quads).append(r)
    if len(ends) != 2 or len(quads) % 2 == 0:
        return None
    end_arcs = []
    for r in ends:
        for f in c.face_orbits()[r[1]][1::2]:
            if c.branch[f // 2] == oval:
                end_arcs.append((ci, f // 2))
                break
    return SnakeWitness(oval, tuple(sorted(coiled)), tuple(quads), tuple(ends), tuple(end_arcs),
                        (len(quads) + 1) // 2)


def find_snakes(arr: Arrangement, curve: str, other_curve: str) -> list:
    out = []
    for b in arr.branches_of(curve):
        if homology_class(arr, b):
            continue
        w = detect_snake(arr, b, other_curve)
        if w is not None:
            out.append(w)
    return out


def complement_components(arr: Arrangement, cut_branches) -> dict:
    """Region -> id of its connected component in the complement of ``cut_branches``."""
    g = dual_graph(arr)
    cut = set(cut_branches)
    adj = {n: [] for n in g.nodes}
    for arc in g.arcs:
        if arc.branch in cut:
            continue
        adj[arc.a].append(arc.b)
        adj[arc.b].append(arc.a)
    label = {}
    for n in g.nodes:
        if n in label:
            continue
        label[n] = len(set(label.values()))
        stack = [n]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in label:
                    label[y] = label[n]
                    stack.append(y)
    return label


@dataclass(frozen=True)
class RegionLabels:
    labels: dict  # region -> "quad" | "end" | "outside"
    end_neighbours: tuple  # regions across the two end arcs
    common: Optional[tuple]  # the outside region touching both end arcs, if any


def classify_regions(arr: Arrangement, witness: SnakeWitness) -> RegionLabels:
    labels = {}
    for r in arr.regions():
        labels[r] = "quad" if r in witness.quads else "end" if r in witness.ends else "outside"
    across = []
    for (ci, h), end in zip(witness.end_arcs, witness.ends):
        a, b = arr.edge_regions(ci, h)
        across.append(b if a == end else a)
    common = across[0] if across[0] == across[1] else None
    return RegionLabels(labels, tuple(across), common)


def free_ovals_together(arr: Arrangement, witness: SnakeWitness) -> bool:
    """Free ovals of the snake's curve share one complementary component of
    snake ∪ other curve, and that component touches both end arcs."""
    curve = arr.branches[witness.oval]
    other = arr.branches[witness.coiled[0]]
    cut = [witness.oval] + arr.branches_of(other)
    comp = complement_components(arr, cut)
    across = classify_regions(arr, witness).end_neighbours
    want = {comp[across[0]], comp[across[1]]}
    if len(want) != 1:
        return False
    for b in free_branches(arr, curve):
        ci = arr.locate(b)
        c = arr.components[ci]
        if not c.is_loop:
            return False
        if comp[arr.region_of(ci, 1)] not in want:
            return False
    return True


def free_branches(arr: Arrangement, curve: str) -> list:
    hit = set()
    for _, _, a, b in arr.crossings():
        if arr.branches[a] != arr.branches[b]:
            hit.add(a)
            hit.add(b)
    return [b for b in arr.branches_of(curve) if b not in hit]


@dataclass(frozen=True)
class BezoutEntry:
    curves: tuple
    crossings: int
    bound: int

    @property
    def ok(self) -> bool:
        return self.crossings <= self.bound

    @property
    def saturated(self) -> bool:
        return self.crossings == self.bound


def bezout_audit(arr: Arrangement) -> list:
    counts = {}
    for _, _, a, b in arr.crossings():
        ca, cb = sorted((arr.branches[a], arr.branches[b]))
        if ca != cb:
            counts[(ca, cb)] = counts.get((ca, cb), 0) + 1
    labels = sorted(arr.curves)
    out = []
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            bound = arr.curves[a].degree * arr.curves[b].degree
            out.append(BezoutEntry((a, b), counts.get((a, b), 0), bound))
    return out
