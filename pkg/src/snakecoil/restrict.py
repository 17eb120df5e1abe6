"""Obstructions: forbidden placements, conditions (I)/(II), mod 8 congruences, line bounds."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional

from . import core
from .canon import canonical_form
from .core import ROOT, Arrangement, dual_graph, homology_class
from .curves import free_branches, oval_sides
from .errors import ConditionsFail, GammaMismatch, OddDegreeUnion


def check_snake_obstructions(arr: Arrangement, witness) -> list:
    """Free ovals of the coiled curve sitting in an end or inside a free oval of the snake's curve."""
    snake_curve = arr.branches[witness.oval]
    other = arr.branches[witness.coiled[0]]
    ends = set(witness.ends)
    holes = {(arr.locate(b), 0) for b in free_branches(arr, snake_curve)
             if arr.components[arr.locate(b)].is_loop}
    bad = []
    for b in free_branches(arr, other):
        ci = arr.locate(b)
        if not arr.components[ci].is_loop or arr.parent[ci] is None:
            continue
        r = arr.region_of(*arr.parent[ci])
        if r in ends or r in holes:
            bad.append(b)
    return bad


def move_inside_snake(arr: Arrangement, witness, oval: str, region=None) -> Arrangement:
    """Re-place a free loop into a quadrangle of the snake.

    By default the first quadrangle coloured unlike the loop's current
    region; those are the moves that shift the free-oval balance ``p - n``.
    """
    ci = arr.locate(oval)
    if not arr.components[ci].is_loop:
        raise ValueError(f"{oval} is not a free loop")
    target = region
    if target is None:
        colours = _two_colour(arr)
        here = arr.region_of(*arr.parent[ci]) if arr.parent[ci] is not None else ROOT
        opposite = [q for q in witness.quads if colours[q] != colours[here]]
        if not opposite:
            raise ValueError("no quadrangle of the opposite colour")
        target = opposite[0]
    parent = list(arr.parent)
    parent[ci] = target
    return core.build(arr.components, parent, arr.curves, arr.branches)


# ---------------------------------------------------------------------------
# sides


def total_degree(arr: Arrangement) -> int:
    return sum(c.degree for c in arr.curves.values())


def _two_colour(arr: Arrangement) -> dict:
    g = dual_graph(arr)
    adj = {n: [] for n in g.nodes}
    for arc in g.arcs:
        adj[arc.a].append(arc.b)
        adj[arc.b].append(arc.a)
    colour = {}
    for start in g.nodes:
        if start in colour:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    stack.append(y)
                elif colour[y] == colour[x]:
                    raise OddDegreeUnion("the curves do not bound a two-sided complement")
    return colour


def gamma(arr: Arrangement) -> Arrangement:
    """The components carrying crossings, with everything else removed."""
    drop = [i for i, c in enumerate(arr.components) if c.is_loop]
    curves = {k: replace(v, nodal=True) for k, v in arr.curves.items()}
    return core.drop_components(arr, drop, curves)


@dataclass(frozen=True)
class SideChoice:
    colours: dict  # region -> 0 | 1
    selected: int
    consistent: bool  # the selected side agrees with a side of Gamma near every crossing

    def regions(self) -> list:
        return [r for r, c in self.colours.items() if c == self.selected]


def side_choice(arr: Arrangement, gamma_side: int = 0) -> SideChoice:
    """Checkerboard colouring; the selected colour matches side ``gamma_side`` of Gamma.

    Side 0 of Gamma is the colour of its first region (the cross-cap region
    when every branch is two-sided).
    """
    if total_degree(arr) % 2:
        raise OddDegreeUnion(f"total degree {total_degree(arr)} is odd")
    colours = _two_colour(arr)
    verts = [i for i, c in enumerate(arr.components) if not c.is_loop]
    if not verts:
        first = arr.regions()[0]
        return SideChoice(colours, colours[first] ^ gamma_side, True)
    g = gamma(arr)
    gcol = _two_colour(g)
    first = g.regions()[0]
    gcol = {r: c ^ gcol[first] for r, c in gcol.items()}
    gindex = {old: new for new, old in enumerate(verts)}
    diffs = set()
    for ci in verts:
        for fi in range(len(arr.components[ci].face_orbits())):
            diffs.add(colours[arr.region_of(ci, fi)] ^ gcol[g.region_of(gindex[ci], fi)])
    x = min(diffs)
    return SideChoice(colours, gamma_side ^ x, len(diffs) == 1)


def chi_plus(arr: Arrangement, side: Optional[SideChoice] = None) -> int:
    """Euler characteristic of the closed selected side."""
    side = side or side_choice(arr)
    chi = sum(arr.region_chi(r) for r in side.regions())
    for c in arr.components:
        if not c.is_loop:
            chi += c.n_vertices - c.n_half // 2
    return chi


def phi_p_n(arr: Arrangement, witness, side: Optional[SideChoice] = None) -> tuple:
    """``(phi, p, n)``: free ovals of the coiled curve outside (p) and inside (n) the snake."""
    disk, _ = oval_sides(arr, witness.oval)
    other = arr.branches[witness.coiled[0]]
    p = n = 0
    outside = []
    for b in free_branches(arr, other):
        ci = arr.locate(b)
        if homology_class(arr, b):
            continue
        r = arr.region_of(*arr.parent[ci]) if arr.parent[ci] is not None else ROOT
        if r in disk:
            n += 1
        else:
            p += 1
            outside.append(r)
    if side is None:
        # count outside free ovals positively: their region is left unselected
        colours = _two_colour(arr)
        if outside:
            anchor = outside[0]
        else:
            (ci, h), end = witness.end_arcs[0], witness.ends[0]
            a, b = arr.edge_regions(ci, h)
            anchor = b if a == end else a
        side = SideChoice(colours, 1 - colours[anchor], True)
    chi = chi_plus(arr, side)
    return chi - p + n, p, n


# ---------------------------------------------------------------------------
# conditions and congruences


@dataclass(frozen=True)
class ConditionReport:
    condition_I: bool
    condition_II: bool
    table: dict  # branch -> (d, d mod 4, contractible, ok)


def branch_degrees(arr: Arrangement) -> dict:
    """Number of points where each branch meets the other branches (self-nodes count twice)."""
    d = {b: 0 for b in arr.branches}
    for ci, v, a, b in arr.crossings():
        d[a] += 1
        d[b] += 1
        if a == b:
            d[a] -= 2
    return d


def condition_checks(arr: Arrangement) -> ConditionReport:
    if total_degree(arr) % 2:
        raise OddDegreeUnion(f"total degree {total_degree(arr)} is odd")
    k = total_degree(arr) // 2
    odd_target = 1 if (k + 1) % 2 == 0 else 3  # (-1)^(k+1) mod 4
    table = {}
    for b, d in sorted(branch_degrees(arr).items()):
        contractible = homology_class(arr, b) == 0
        want = 0 if contractible else odd_target
        table[b] = (d, d % 4, contractible, d % 4 == want)
    # crossings are transverse double points by construction
    return ConditionReport(True, all(row[3] for row in table.values()), table)


def union_rank(arr: Arrangement) -> Optional[int]:
    ranks = [c.rank for c in arr.curves.values()]
    return None if any(r is None for r in ranks) else sum(ranks)


def union_type(arr: Arrangement) -> Optional[str]:
    types = [c.type for c in arr.curves.values()]
    if any(t == "II" for t in types):
        return "II"
    if any(t is None for t in types):
        return None
    return "I"


@dataclass(frozen=True)
class CongruenceReport:
    chi_plus: int
    rank: Optional[int]
    type: Optional[str]
    condition_I: bool
    condition_II: bool
    table: dict
    mode: str
    target: Optional[int]  # k^2 + q mod 8, when known
    mod8_m: Optional[bool] = None  # M-curve: chi+ = k^2 + q
    mod8_m1: Optional[bool] = None  # (M-1)-curve: chi+ = k^2 + q +- 1
    mod8_m2: Optional[bool] = None  # (M-2) Type II: chi+ != k^2 + q + 4
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v is not False for v in (self.mod8_m, self.mod8_m1, self.mod8_m2))


def congruence_check(candidate: Arrangement, reference: Optional[Arrangement] = None,
                     q: Optional[int] = None, mode: str = "relative") -> CongruenceReport:
    """Test the mod 8 congruences for the union of all curves of ``candidate``.

    Relative mode reads ``k^2 + q`` off a reference M-curve sharing Gamma;
    absolute mode takes ``q`` from the caller.
    """
    cond = condition_checks(candidate)
    if not cond.condition_II:
        bad = [b for b, row in cond.table.items() if not row[3]]
        raise ConditionsFail(f"condition (II) fails on {', '.join(bad)}")
    chi = chi_plus(candidate)
    rank, typ = union_rank(candidate), union_type(candidate)
    notes = []
    target = None
    if mode == "relative":
        if reference is None:
            raise ValueError("relative mode needs a reference")
        if canonical_form(gamma(candidate)) != canonical_form(gamma(reference)):
            raise GammaMismatch("candidate and reference differ on the crossing components")
        if union_rank(reference) == 0:
            target = chi_plus(reference) % 8
        else:
            notes.append("reference is not an M-curve; k^2+q undetermined")
    elif mode == "absolute":
        if q is None:
            raise ValueError("absolute mode needs q")
        k = total_degree(candidate) // 2
        target = (k * k + q) % 8
    else:
        raise ValueError(f"unknown mode {mode!r}")
    mod8_m = mod8_m1 = mod8_m2 = None
    if target is not None:
        if rank == 0:
            mod8_m = chi % 8 == target
        elif rank == 1:
            mod8_m1 = chi % 8 in ((target + 1) % 8, (target - 1) % 8)
        elif rank == 2 and typ == "II":
            mod8_m2 = chi % 8 != (target + 4) % 8
        elif rank == 2 and typ == "I":
            notes.append("(M-2) Type I: complex orientations needed; undetermined")
    return CongruenceReport(chi, rank, typ, cond.condition_I, cond.condition_II, cond.table,
                            mode, target, mod8_m, mod8_m1, mod8_m2, notes)


# ---------------------------------------------------------------------------
# auxiliary lines and conics


@dataclass(frozen=True)
class LineBound:
    crossings: Optional[int]  # None when no admissible closed walk exists
    bound: int
    homology: int
    capped: bool  # search stopped at the walk-length cap

    @property
    def obstructed(self) -> bool:
        return self.crossings is None or self.crossings > self.bound


def _moves(arr, curve):
    """Region -> list of (next region, cost, homology flip)."""
    g = dual_graph(arr)
    out = {n: [] for n in g.nodes}
    for arc in g.arcs:
        cost = 1 if arc.curve == curve else 0
        out[arc.a].append((arc.b, cost, arc.twist))
        out[arc.b].append((arc.a, cost, arc.twist))
    if g.crosscap is not None:
        out[g.crosscap].append((g.crosscap, 0, 1))
    return out


def min_crossings(arr: Arrangement, through, curve: str, homology: int = 1,
                  max_steps: Optional[int] = None):
    """Fewest crossings with ``curve`` of a closed dual walk visiting ``through``.

    Returns ``(value, capped)``.  The search runs over (region, homology bit,
    visited subset) with 0-1 edge weights; ``max_steps`` optionally bounds
    walk length, in which case the answer is exact only up to that length.
    """
    through = list(dict.fromkeys(through))
    if not through:
        raise ValueError("need at least one region")
    moves = _moves(arr, curve)
    for r in through:
        if r not in moves:
            raise ValueError(f"unknown region {r}")
    bit_of = {r: 1 << i for i, r in enumerate(through)}
    full = (1 << len(through)) - 1
    start = (through[0], 0, bit_of[through[0]])
    if max_steps is None:
        dist = {start: 0}
        dq = deque([start])
        done = set()
        while dq:
            state = dq.popleft()
            if state in done:
                continue
            done.add(state)
            r, h, m = state
            d = dist[state]
            for r2, cost, flip in moves[r]:
                nxt = (r2, h ^ flip, m | bit_of.get(r2, 0))
                nd = d + cost
                if nd < dist.get(nxt, 1 << 60):
                    dist[nxt] = nd
                    (dq.appendleft if cost == 0 else dq.append)(nxt)
        goal = (through[0], homology, full)
        return dist.get(goal), False
    # layered by steps; a walk returning to the start counts once it is closed
    best = None
    layer = {start: 0}
    capped = False
    for _ in range(max_steps):
        nxt_layer = {}
        for (r, h, m), d in layer.items():
            for r2, cost, flip in moves[r]:
                key = (r2, h ^ flip, m | bit_of.get(r2, 0))
                nd = d + cost
                if nd < nxt_layer.get(key, 1 << 60):
                    nxt_layer[key] = nd
        layer = nxt_layer
        got = layer.get((through[0], homology, full))
        if got is not None and (best is None or got < best):
            best = got
        if not layer:
            break
    else:
        capped = True
    return best, capped


def pseudoline_min_crossings(arr: Arrangement, through, curve: str) -> LineBound:
    """Bezout test for an auxiliary line through the given regions."""
    value, capped = min_crossings(arr, through, curve, homology=1)
    return LineBound(value, arr.curves[curve].degree, 1, capped)


def pseudoconic_min_crossings(arr: Arrangement, through, curve: str, max_steps: int = 24) -> LineBound:
    """Same for a contractible auxiliary conic; bound is twice the degree."""
    if len(set(through)) > 5:
        raise ValueError("a conic is fixed by five points")
    value, capped = min_crossings(arr, through, curve, homology=0, max_steps=max_steps)
    return LineBound(value, 2 * arr.curves[curve].degree, 0, capped)


def brute_force_min_crossings(arr: Arrangement, through, curve: str, homology: int = 1,
                              max_len: int = 12):
    """Exhaustive enumeration of closed dual walks up to ``max_len`` steps (test oracle)."""
    through = list(dict.fromkeys(through))
    moves = _moves(arr, curve)
    need = set(through)
    start = through[0]
    best = [None]

    def walk(r, h, seen, cost, steps):
        if best[0] is not None and cost >= best[0]:
            return
        if steps and r == start and h == homology and need <= seen:
            best[0] = cost
            return
        if steps == max_len:
            return
        for r2, c, flip in moves[r]:
            walk(r2, h ^ flip, seen | {r2}, cost + c, steps + 1)

    walk(start, 0, frozenset([start]), 0, 0)
    return best[0]


def validate_pencil_certificate(cert) -> list:
    """Syntax check of a pencil-maximality certificate; returns the problems found.

    Only the shape is checked: a pencil centre, intervals in [0, 1] and a
    maximality flag per interval.  Nothing about the curves is verified.
    """
    problems = []
    if not isinstance(cert, dict):
        return ["certificate must be a mapping"]
    for key in ("centre", "intervals", "maximal"):
        if key not in cert:
            problems.append(f"missing {key!r}")
    if problems:
        return problems
    iv, mx = cert["intervals"], cert["maximal"]
    if not isinstance(iv, list) or not isinstance(mx, list):
        return ["intervals and maximal must be lists"]
    if len(iv) != len(mx):
        problems.append("one maximality flag per interval")
    for i, pair in enumerate(iv):
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(t, (int, float)) for t in pair)
                or not 0 <= pair[0] < pair[1] <= 1):
            problems.append(f"interval {i} must be [a, b] with 0 <= a < b <= 1")
    for i, flag in enumerate(mx):
        if not isinstance(flag, bool):
            problems.append(f"maximal[{i}] must be true or false")
    return problems
