"""Perturbing a doubled conic into a quartic with a snake, and degenerating back.

Both constructions start from a compiled base: a conic ``q`` (curve ``Q``)
meeting the curve ``C`` at 2k points.  The gap ``g`` is the conic arc from
the (g-1)-th to the g-th crossing along the conic strand.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from . import core
from .builder import MapBuilder
from .canon import canonical_form
from .codec import CONIC, CONIC_BRANCH
from .core import Arrangement, Curve, dual_graph, make_loop
from .curves import classify_regions, find_snakes, free_branches, oval_sides
from .errors import BadArc, BadGap, DigonOccupied, NotFacing, NotMCurve, RegionMeetsCk

SNAKE_CURVE = "S"
SNAKE_BRANCH = "s"
FREE_OVALS = ("s1", "s2", "s3")


@dataclass(frozen=True)
class GapChoice:
    base: Arrangement
    gap: int

    def __post_init__(self):
        n = len(conic_walk(self.base)[1])
        if not 1 <= self.gap <= n:
            raise BadGap(f"gap must be in 1..{n}, got {self.gap}")


def conic_walk(arr: Arrangement):
    """``(component, walk)``; ``walk[j]`` is the conic half-edge leaving crossing j."""
    if CONIC_BRANCH not in arr.branches:
        raise BadGap("arrangement has no conic branch")
    ci = arr.locate(CONIC_BRANCH)
    c = arr.components[ci]
    if c.is_loop:
        raise BadGap("the conic meets nothing")
    walks = c.strands()[CONIC_BRANCH]
    return ci, walks[0]


def _remap_parents(arr, ci, comps, parent, new_comp, flag_image):
    """Replace component ``ci`` and move its children to the image faces."""
    old = arr.components[ci]
    orbits = old.face_orbits()
    comps[ci] = new_comp
    for i, p in enumerate(parent):
        if p is not None and p[0] == ci:
            parent[i] = (ci, flag_image(orbits[p[1]][0]))
    return comps, parent


def _curves_with_snake(arr):
    curves = {k: v for k, v in arr.curves.items() if k != CONIC}
    curves[SNAKE_CURVE] = Curve(SNAKE_CURVE, 4, 0, "I")
    branches = {b: c for b, c in arr.branches.items() if b != CONIC_BRANCH}
    branches[SNAKE_BRANCH] = SNAKE_CURVE
    for b in FREE_OVALS:
        branches[b] = SNAKE_CURVE
    return curves, branches


def _finish(arr, ci, mb, outer_flag, flag_image, gap_flag):
    relabel = {CONIC_BRANCH: SNAKE_BRANCH}
    new, index = mb.component(outer_flag=outer_flag, relabel=relabel)

    def image(f):
        h, b = flag_image(f)
        return new.face_of_flag(2 * index[h] + b)

    comps, parent = list(arr.components), list(arr.parent)
    _remap_parents(arr, ci, comps, parent, new, image)
    h, b = gap_flag
    gap_face = new.face_of_flag(2 * index[h] + b)
    for name in FREE_OVALS:
        comps.append(make_loop(name))
        parent.append((ci, gap_face))
    curves, branches = _curves_with_snake(arr)
    return core.build(comps, parent, curves, branches)


def snake_from_conic(base: Arrangement, gap: int) -> Arrangement:
    """Replace the conic by the boundary of a thin neighbourhood of the long arc.

    Every crossing of the conic is doubled along the strand of ``C``; the
    two copies are joined by parallel snake arcs except across gap ``g``,
    where each side closes by a U-turn.  Three free ovals go into the face
    beyond the U-turns.
    """
    GapChoice(base, gap)
    ci, walk = conic_walk(base)
    c = base.components[ci]
    mb = MapBuilder.from_component(c)
    mb.rot = {}
    conic_at = {}  # conic half-edge -> (vertex j, "a" | "c")
    for j, hc in enumerate(walk):
        conic_at[hc] = (j, "c")
        conic_at[c.opposite(hc)] = (j, "a")
    for v, cyc in enumerate(c.rot):
        if not any(h in conic_at for h in cyc):
            mb.rot[v] = list(cyc)

    def copy_key(h, s):
        """Copy vertex holding side ``s`` of conic half-edge ``h``: 'Y' or 'X'."""
        kind = conic_at[h][1]
        return "Y" if (kind == "c") == (s > 0) else "X"

    for j, hc in enumerate(walk):
        ha = c.opposite(hc)
        y, x = c.next(hc), c.prev(hc)
        mb.rot[("Y", j)] = [("a", "Y", j), ("m", "Y", j), ("c", "Y", j), y]
        mb.rot[("X", j)] = [("a", "X", j), x, ("c", "X", j), ("m", "X", j)]
        mb.connect(("m", "Y", j), ("m", "X", j), 1, c.branch[y])
        for h in (ha, hc):
            if h in mb.pair:
                mb.detach(h)

    def conic_copy(h, s):
        j, kind = conic_at[h]
        return (kind, copy_key(h, s), j)

    for j, hc in enumerate(walk):
        nxt = c.pair[hc]
        sigma = c.sign[hc]
        if j == gap - 1:
            jn = conic_at[nxt][0]
            mb.connect(("c", "Y", j), ("c", "X", j), 1, CONIC_BRANCH)
            mb.connect(("a", "Y", jn), ("a", "X", jn), 1, CONIC_BRANCH)
            continue
        for s in (1, -1):
            s2 = -s if sigma > 0 else s
            mb.connect(conic_copy(hc, s), conic_copy(nxt, s2), sigma, CONIC_BRANCH)

    def flag_image(f):
        h, b = f // 2, f % 2
        if h in conic_at:
            return (conic_copy(h, 1 if b == 0 else -1), b)
        return (h, b)

    outer_flag = None
    if c.outer is not None:
        outer_flag = flag_image(c.face_orbits()[c.outer][0])
    gap_flag = (("c", "Y", gap - 1), 0)
    return _finish(base, ci, mb, outer_flag, flag_image, gap_flag)


def _check_points(gap, points4, n):
    if len(points4) != 4:
        raise BadArc(f"need four points, got {len(points4)}")
    seen = set()
    for arc, t in points4:
        if arc != gap:
            raise BadArc(f"point on arc {arc}, expected arc {gap}")
        if not 0 < t < 1:
            raise BadArc(f"point parameter {t} is not strictly inside the arc")
        if t in seen:
            raise BadArc("points must be distinct")
        seen.add(t)
    if not 1 <= gap <= n:
        raise BadArc(f"arc must be in 1..{n}, got {gap}")


def chain_of_digons(base: Arrangement, arc: int, points4) -> Arrangement:
    """Second conic through four points of one arc, then smooth its crossings.

    A parallel copy of the conic runs on one side of the long arc and
    crosses the conic four times inside arc ``arc``; points are ``(arc, t)``
    with ``0 < t < 1``.  Smoothing each crossing turns the chain of digons
    into the snake (the long digon) and three small ovals.
    """
    ci, walk = conic_walk(base)
    n = len(walk)
    _check_points(arc, points4, n)
    c = base.components[ci]
    mb = MapBuilder.from_component(c)
    pos = {h: j for j, h in enumerate(walk)}
    g0 = arc - 1  # conic edge walk[g0] -> walk[g0 + 1] carries the points
    start = (g0 + 1) % n
    # side of walk[j] on which the copy runs: +1 toward next(walk[j])
    side = {start: 1}
    j = start
    for _ in range(n - 1):
        hc = walk[j]
        nxt = c.pair[hc]
        bb = 0 if side[j] > 0 else 1
        h2, b2 = nxt, (1 - bb if c.sign[hc] > 0 else bb)
        jn = pos[c.opposite(h2)]
        # flag (a, b2) lies toward next(a) = prev(c) when b2 == 0
        side[jn] = -1 if b2 == 0 else 1
        j = jn
    wkey, inner_of = {}, {}
    for j, hc in enumerate(walk):
        z = c.next(hc) if side[j] > 0 else c.prev(hc)
        w = ("w", j)
        qa, qc, inner, outer = ("qa", j), ("qc", j), ("in", j), ("out", j)
        if side[j] > 0:
            mb.vertex(w, [qa, inner, qc, outer])
        else:
            mb.vertex(w, [qa, outer, qc, inner])
        wkey[z] = outer
        mb.pair[outer] = None  # placeholder, wired below
        mb.sign[outer], mb.branch[outer] = c.sign[z], c.branch[z]
        mb.pair[inner], mb.sign[inner], mb.branch[inner] = z, 1, c.branch[z]
        inner_of[z] = inner
    for z, outer in wkey.items():
        far = c.pair[z]
        mb.pair[outer] = wkey.get(far, far)
        if far not in wkey:
            mb.pair[far] = outer
        mb.pair[z], mb.sign[z] = inner_of[z], 1
    for j, hc in enumerate(walk):
        if j == g0:
            continue
        jn = pos[c.opposite(c.pair[hc])]
        mb.connect(("qc", j), ("qa", jn), c.sign[hc], CONIC_BRANCH)
    # the four crossings on the gap edge, west to east
    hc = walk[g0]
    ha = c.pair[hc]
    jn = (g0 + 1) % n
    sigma = c.sign[hc]
    arrive = side[g0]  # +1: the copy arrives at p1 from the north
    for i in range(4):
        p = ("p", i)
        mb.vertex(p, [("Qe", i), ("N", i), ("Qw", i), ("S", i)])
    mb.connect(hc, ("Qw", 0), 1, CONIC_BRANCH)
    for i in range(3):
        mb.connect(("Qe", i), ("Qw", i + 1), 1, CONIC_BRANCH)
    mb.connect(("Qe", 3), ha, sigma, CONIC_BRANCH)
    west = []
    east = []
    for i in range(4):
        up = arrive if i % 2 == 0 else -arrive
        west.append(("N", i) if up > 0 else ("S", i))
        east.append(("S", i) if up > 0 else ("N", i))
    mb.connect(("qc", g0), west[0], 1, CONIC_BRANCH)
    for i in range(3):
        mb.connect(east[i], west[i + 1], 1, CONIC_BRANCH)
    mb.connect(east[3], ("qa", jn), sigma, CONIC_BRANCH)
    for i in range(4):
        mb.smooth(("p", i), [(("Qw", i), west[i]), (("Qe", i), east[i])])
    if len(mb.loops) != 3:
        raise BadArc(f"smoothing produced {len(mb.loops)} small ovals, expected 3")
    mb.loops = []

    def flag_image(f):
        h, b = f // 2, f % 2
        if h in wkey:
            return (wkey[h], b)
        if h in pos:
            j = pos[h]
            if (side[j] > 0) == (b == 0):
                return (("qc", j), b)
        elif c.opposite(h) in pos:
            j = pos[c.opposite(h)]
            # out side of a: toward prev(a) when the copy runs on next(c)
            if (side[j] > 0) == (b == 1):
                return (("qa", j), b)
        return (h, b)

    outer_flag = None
    if c.outer is not None:
        outer_flag = flag_image(c.face_orbits()[c.outer][0])
    out_b = 0 if side[g0] > 0 else 1
    gap_flag = (("qc", g0), out_b)
    return _finish(base, ci, mb, outer_flag, flag_image, gap_flag)


# ---------------------------------------------------------------------------
# the modification ⊃⊂ -> × and degeneration


def _touching(arr: Arrangement, oval: str) -> set:
    return {r for arc in dual_graph(arr).arcs if arc.branch == oval for r in (arc.a, arc.b)}


def _pick_edge(arr, ci, oval, region, edge=None):
    """Departure and arrival flags of an edge of ``oval`` bounding ``region``."""
    c = arr.components[ci]
    orbits = c.face_orbits()
    for fi in range(len(orbits)):
        if arr.region_of(ci, fi) != region:
            continue
        orbit = orbits[fi]
        for i in range(1, len(orbit), 2):
            h = orbit[i] // 2
            if c.branch[h] != oval:
                continue
            if edge is not None and edge not in (h, c.pair[h]):
                continue
            return orbit[i], orbit[(i + 1) % len(orbit)]
    raise NotFacing(f"no edge of {oval} bounds region {region}")


def _add_component(mb: MapBuilder, c, tag):
    for v, cyc in enumerate(c.rot):
        mb.rot[(tag, "v", v)] = [(tag, h) for h in cyc]
    for h in range(c.n_half):
        mb.pair[(tag, h)] = (tag, c.pair[h])
        mb.sign[(tag, h)] = c.sign[h]
        mb.branch[(tag, h)] = c.branch[h]


def _join(arr, a, b, region, edge_a=None, edge_b=None):
    """Cut one arc of ``a`` and one of ``b`` bounding ``region`` and cross-connect them.

    Returns the new arrangement and a dict with the merged component index,
    the new id of every old half-edge of ``a``'s component (``index``) and,
    when ``b`` was a loop, the half-edge of its lobe (``lobe``).
    """
    ca, cb = arr.locate(a), arr.locate(b)
    A, B = arr.components[ca], arr.components[cb]
    if A.is_loop and not B.is_loop:
        raise NotFacing(f"put the crossing branch first: join {b} with {a}")
    mb = MapBuilder() if A.is_loop else MapBuilder.from_component(A)
    w = ("w",)
    Be, Bw, Aw, Ae = ("Be",), ("Bw",), ("Aw",), ("Ae",)
    parent_of_merged = arr.parent[ca]
    outer_flag = None
    moves = {}  # (component, face) -> builder flag now marking that face

    def remember(ci, comp, key_of):
        for fi, orbit in enumerate(comp.face_orbits()):
            f = orbit[0]
            moves[(ci, fi)] = (key_of(f // 2), f % 2)

    if A.is_loop:
        if arr.region_of(ca, 1) != region or arr.region_of(cb, 1) != region:
            raise NotFacing("ovals do not share a face")
        mb.vertex(w, [Be, Bw, Aw, Ae])
        mb.connect(Aw, Ae, 1, a)
        mb.connect(Be, Bw, 1, b)
        moves[(ca, 0)] = (Aw, 0)
        moves[(cb, 0)] = (Be, 0)
        outer_flag = (Aw, 1)
    else:
        (fx, fy) = _pick_edge(arr, ca, a, region, edge_a)
        hx, bx, hy, by = fx // 2, fx % 2, fy // 2, fy % 2
        remember(ca, A, lambda h: h)
        if not A.one_sided:
            f = A.face_orbits()[A.outer][0]
            outer_flag = (f // 2, f % 2)
        if B.is_loop:
            if arr.region_of(cb, 1) != region:
                raise NotFacing(f"{b} does not lie in region {region}")
            moves[(cb, 0)] = (Be, 0)
        else:
            if cb == ca:
                key = lambda h: h  # noqa: E731
            else:
                _add_component(mb, B, "B")
                key = lambda h: ("B", h)  # noqa: E731
                remember(cb, B, key)
                if region[0] == cb:  # A sits in a face of B
                    parent_of_merged = arr.parent[cb]
                    if B.outer is not None:
                        f = B.face_orbits()[B.outer][0]
                        outer_flag = (key(f // 2), f % 2)
                    else:
                        outer_flag = None
            (fu, fz) = _pick_edge(arr, cb, b, region, edge_b)
            hu, bu, hz, bz = key(fu // 2), fu % 2, key(fz // 2), fz % 2
        mb.vertex(w, [Be, Bw, Aw, Ae])
        mb.connect(Aw, hx, 1 if bx == 0 else -1, a)
        mb.connect(Ae, hy, 1 if by == 1 else -1, a)
        if B.is_loop:
            mb.connect(Be, Bw, 1, b)
        else:
            mb.connect(Be, hu, 1 if bu == 0 else -1, b)
            mb.connect(Bw, hz, 1 if bz == 1 else -1, b)
    new, index = mb.component(outer_flag=outer_flag, relabel={b: a})
    comps, parent = list(arr.components), list(arr.parent)
    comps[ca] = new
    parent[ca] = parent_of_merged
    for i, p in enumerate(parent):
        if p is not None and p in moves and i != ca:
            h, bit = moves[p]
            parent[i] = (ca, new.face_of_flag(2 * index[h] + bit))
    if cb != ca:
        del comps[cb], parent[cb]
        parent = [None if p is None else ((p[0] - 1 if p[0] > cb else p[0]), p[1]) for p in parent]
        if cb < ca:
            ca -= 1
    curves = dict(arr.curves)
    cl = arr.branches[a]
    curves[cl] = replace(curves[cl], nodal=True)
    branches = {x: y for x, y in arr.branches.items() if x != b or a == b}
    out = core.build(comps, parent, curves, branches)
    info = {"component": ca, "index": {h: index[h] for h in index if isinstance(h, int)}}
    if B.is_loop:
        info["lobe"] = index[Be]
    return out, info


def modify_join(arr: Arrangement, oval_a: str, oval_b: str, region=None) -> Arrangement:
    """Replace two facing arcs of ``oval_a`` and ``oval_b`` by a transverse node.

    ``region`` is the region the two arcs face across; by default the first
    region touching both.  The new arcs stay inside that region, so they do
    not meet the other curve.
    """
    for o in (oval_a, oval_b):
        if o not in arr.branches:
            raise NotFacing(f"unknown branch {o}")
    if oval_a == oval_b:
        raise NotFacing(f"{oval_a} cannot face itself")
    if arr.branches[oval_a] != arr.branches[oval_b]:
        raise NotFacing(f"{oval_a} and {oval_b} belong to different curves")
    ta, tb = _touching(arr, oval_a), _touching(arr, oval_b)
    if region is None:
        common = sorted(ta & tb)
        region = common[0] if common else None
    if region is None or region not in ta or region not in tb:
        if _reach_avoiding(arr, ta, tb, arr.branches[oval_a]):
            raise RegionMeetsCk(f"{oval_a} and {oval_b} only face each other across the other curve")
        raise NotFacing(f"{oval_a} and {oval_b} do not bound a common region")
    a, b = oval_a, oval_b
    if arr.components[arr.locate(a)].is_loop and not arr.components[arr.locate(b)].is_loop:
        a, b = b, a
    out, _ = _join(arr, a, b, region)
    if a != oval_a:
        out = _rename_branch(out, a, oval_a)
    return out


def _rename_branch(arr, old, new):
    comps = []
    for c in arr.components:
        if c.is_loop:
            comps.append(replace(c, loop=new if c.loop == old else c.loop, _cache={}))
        else:
            br = tuple(new if x == old else x for x in c.branch)
            comps.append(replace(c, branch=br, _cache={}))
    branches = {(new if b == old else b): cl for b, cl in arr.branches.items()}
    return core.build(comps, arr.parent, arr.curves, branches)


def _reach_avoiding(arr, start, goal, curve) -> bool:
    """Can ``start`` regions reach ``goal`` regions crossing only other curves?"""
    adj = {}
    for arc in dual_graph(arr).arcs:
        if arc.curve == curve:
            continue
        adj.setdefault(arc.a, []).append(arc.b)
        adj.setdefault(arc.b, []).append(arc.a)
    seen = set(start)
    stack = list(start)
    while stack:
        x = stack.pop()
        if x in goal:
            return True
        for y in adj.get(x, []):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


@dataclass(frozen=True)
class Degeneration:
    nodal: Arrangement
    circles: tuple  # crossings of each straight strand with the other curve
    k: int

    @property
    def ok(self) -> bool:
        return len(self.circles) == 2 and all(n == 2 * self.k for n in self.circles)


def occupied_digons(arr: Arrangement, witness, frees) -> list:
    """Branches of other curves lying inside the snake or inside a free oval."""
    disk, _ = oval_sides(arr, witness.oval)
    curve = arr.branches[witness.oval]
    inside_free = {(arr.locate(f), 0) for f in frees}
    bad = []
    for ci, c in enumerate(arr.components):
        if not c.is_loop or arr.branches[c.loop] == curve or arr.parent[ci] is None:
            continue
        r = arr.region_of(*arr.parent[ci])
        if r in disk or r in inside_free:
            bad.append(c.loop)
    return sorted(bad)


def _straight_circles(arr: Arrangement, branch: str) -> tuple:
    ci = arr.locate(branch)
    c = arr.components[ci]
    curve = arr.branches[branch]
    out = []
    for walk in c.strands()[branch]:
        out.append(sum(1 for h in walk if arr.branches[c.branch[c.next(h)]] != curve))
    return tuple(out)


def degenerate_to_two_conics(arr: Arrangement, witness=None) -> Degeneration:
    """Join end arc, free ovals and the other end arc in a chain of four nodes.

    The resulting nodal quartic should split along straight strands into
    two circles, each crossing the other curve 2k times.
    """
    if witness is None:
        snakes = []
        for cl in sorted(arr.curves):
            for other in sorted(arr.curves):
                if other != cl and arr.curves[cl].degree == 4:
                    snakes += find_snakes(arr, cl, other)
        if not snakes:
            raise NotMCurve("no snake found")
        witness = snakes[0]
    s = witness.oval
    cl = arr.branches[s]
    curve = arr.curves[cl]
    if curve.degree != 4 or curve.nodal or curve.rank != 0 or len(arr.branches_of(cl)) != 4:
        raise NotMCurve(f"curve {cl} is not a non-singular M-quartic")
    frees = free_branches(arr, cl)
    if len(frees) != 3:
        raise NotMCurve(f"expected three free ovals of {cl}, found {len(frees)}")
    bad = occupied_digons(arr, witness, frees)
    if bad:
        raise DigonOccupied(f"ovals {', '.join(bad)} lie in a digon of the degeneration")
    common = classify_regions(arr, witness).common
    if common is None:
        raise NotFacing("the two ends do not face one region")
    (ci, h1), (_, h2) = witness.end_arcs
    cur, info = _join(arr, s, frees[0], common, edge_a=h1)
    h2 = info["index"][h2]
    for f in frees[1:]:
        lobe = info["lobe"]
        region = _shared_side(cur, info["component"], lobe, h2)
        cur, info2 = _join(cur, s, f, region, edge_a=lobe)
        h2 = info2["index"][h2]
        info = info2
    lobe = info["lobe"]
    region = _shared_side(cur, info["component"], lobe, h2)
    cur, _ = _join(cur, s, s, region, edge_a=lobe, edge_b=h2)
    return Degeneration(cur, _straight_circles(cur, s), witness.k)


def _shared_side(arr, ci, h1, h2):
    common = set(arr.edge_regions(ci, h1)) & set(arr.edge_regions(ci, h2))
    if len(common) != 1:
        raise NotFacing("lobe and end arc do not face a single region")
    return common.pop()


@dataclass
class SnakeResult:
    arrangement: Arrangement
    provenance: list  # (base name, gap) of every construction landing here
    coiled: int


def _gaps_of(item):
    name, base = item
    out = []
    for g in range(1, len(conic_walk(base)[1]) + 1):
        arr = snake_from_conic(base, g)
        out.append((name, g, arr, canonical_form(arr)))
    return out


def enumerate_snakes(bases, threads: int = 1) -> list:
    """Run every gap of every base and keep one arrangement per isotopy type.

    ``bases`` holds arrangements or ``(name, arrangement)`` pairs.  Order of
    the result follows first occurrence, whatever ``threads`` is.
    """
    items = [b if isinstance(b, tuple) else (f"base{i}", b) for i, b in enumerate(bases)]
    if threads > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            batches = list(pool.map(_gaps_of, items))
    else:
        batches = [_gaps_of(it) for it in items]
    seen = {}
    out = []
    for batch in batches:
        for name, g, arr, cf in batch:
            if cf in seen:
                out[seen[cf]].provenance.append((name, g))
                continue
            seen[cf] = len(out)
            out.append(SnakeResult(arr, [(name, g)], coiled_count(arr)))
    return out


def coiled_count(arr: Arrangement, snake: str = SNAKE_BRANCH) -> int:
    c = arr.components[arr.locate(snake)]
    met = set()
    for cyc in c.rot:
        pair = {c.branch[cyc[0]], c.branch[cyc[1]]}
        if snake in pair and len(pair) == 2:
            met |= pair - {snake}
    return len(met)


def histogram(results) -> dict:
    out = {}
    for r in results:
        out[r.coiled] = out.get(r.coiled, 0) + 1
    return dict(sorted(out.items()))
