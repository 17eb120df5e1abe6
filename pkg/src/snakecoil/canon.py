"""Canonical certificates of arrangements up to homeomorphism of the plane.

Each component is numbered by a breadth-first walk over its flags, started
from every admissible flag; the lexicographically least walk wins.  Walks
use the side-swap, corner and edge-end involutions, so reflections and
re-gauging of edge signs are quotiented automatically.  Nested components
contribute their own certificates to the face they sit in.
"""
from __future__ import annotations

from .core import ROOT, Arrangement


def _loop_code(arr, ci, cache, chiral):
    c = arr.components[ci]
    inside = tuple(sorted(_code(arr, j, cache, chiral) for j in arr.children((ci, 0))))
    return ("L", arr.branches[c.loop], int(c.twisted), inside)


def _code(arr: Arrangement, ci: int, cache: dict, chiral: bool):
    got = cache.get(ci)
    if got is not None:
        return got
    c = arr.components[ci]
    if c.is_loop:
        got = _loop_code(arr, ci, cache, chiral)
        cache[ci] = got
        return got
    orbits = c.face_orbits()
    infos = []
    for fi in range(len(orbits)):
        if c.outer == fi:
            infos.append(("outer",))
        else:
            infos.append(("in",) + tuple(sorted(_code(arr, j, cache, chiral) for j in arr.children((ci, fi)))))
    table = sorted(set(infos))
    face_rank = [table.index(x) for x in infos]
    labels = sorted({arr.branches[b] for b in c.branch})
    curve_rank = [labels.index(arr.branches[b]) for b in c.branch]
    nflags = 2 * c.n_half
    face_of = [0] * nflags
    for fi, orbit in enumerate(orbits):
        for f in orbit:
            face_of[f] = fi
    moves = [(f ^ 1, c.corner(f), c.edge_end(f)) for f in range(nflags)]

    def signature(f):
        return (curve_rank[f // 2], face_rank[face_of[f]], len(orbits[face_of[f]]),
                face_rank[face_of[f ^ 1]], len(orbits[face_of[f ^ 1]]))

    starts = range(nflags)
    if chiral and not c.one_sided:
        orient = c.orientation_gauge()
        starts = [f for f in starts if (f % 2 == 0) == (orient[c.vertex_of(f // 2)] > 0)]
    sigs = {f: signature(f) for f in starts}
    best_sig = min(sigs.values())
    starts = [f for f in starts if sigs[f] == best_sig]

    best = None
    for s in starts:
        num = {s: 0}
        order = [s]
        seen_face = set()
        out = []
        worse = False
        decided = best is None
        pos = 0
        for f in order:
            for g in moves[f]:
                n = num.get(g)
                if n is None:
                    n = num[g] = len(order)
                    order.append(g)
                out.append(n)
            out.append(curve_rank[f // 2])
            fi = face_of[f]
            if fi in seen_face:
                out.append(-1)
            else:
                seen_face.add(fi)
                out.append(face_rank[fi])
            if not decided:
                while pos < len(out):
                    if out[pos] != best[pos]:
                        if out[pos] > best[pos]:
                            worse = True
                        decided = True
                        break
                    pos += 1
                if worse:
                    break
        if worse:
            continue
        cand = tuple(out)
        if best is None or cand < best:
            best = cand
    got = ("M", tuple(labels), tuple(table), best)
    cache[ci] = got
    return got


def canonical_tree(arr: Arrangement, chiral: bool = False):
    cache = {}
    r = arr.root_component()
    if r is not None:
        return _code(arr, r, cache, chiral)
    tops = tuple(sorted(_code(arr, j, cache, chiral) for j in arr.children(ROOT)))
    return ("R", tops)


def canonical_form(arr: Arrangement, chiral: bool = False) -> bytes:
    """Byte certificate; equal certificates mean isotopic arrangements."""
    key = ("canon", chiral)
    got = arr._cache.get(key)
    if got is None:
        got = repr(canonical_tree(arr, chiral)).replace(" ", "").encode("ascii")
        arr._cache[key] = got
    return got


def is_isotopic(a: Arrangement, b: Arrangement, chiral: bool = False) -> bool:
    return canonical_form(a, chiral) == canonical_form(b, chiral)


def dedupe(items, key=None, chiral: bool = False):
    """Keep first occurrences; returns ``(kept, merge)``.

    ``merge[i]`` is the position in ``kept`` of the representative of
    ``items[i]``.
    """
    key = key or (lambda x: x)
    index = {}
    kept = []
    merge = []
    for item in items:
        cf = canonical_form(key(item), chiral)
        if cf not in index:
            index[cf] = len(kept)
            kept.append(item)
        merge.append(index[cf])
    return kept, merge


def decode_component(code):
    """Rebuild a map from a component code in canonical numbering.

    Returns ``(component, face_info)``; strands are labelled by curve and
    ``face_info[i]`` is the table entry (``("outer",)`` or the child codes)
    of face ``i`` of the rebuilt component.
    """
    from .core import Component

    _, labels, table, best = code
    n = len(best) // 5
    swap = [best[5 * f] for f in range(n)]
    corner = [best[5 * f + 1] for f in range(n)]
    edge_end = [best[5 * f + 2] for f in range(n)]
    curve = [best[5 * f + 3] for f in range(n)]
    half = {}  # canonical flag -> (half-edge, side)
    rot = []
    for f0 in range(n):
        if f0 in half:
            continue
        cyc = []
        f = f0
        while True:
            h = len(half) // 2
            half[f], half[swap[f]] = (h, 0), (h, 1)
            cyc.append(h)
            g = swap[corner[f]]  # side 0 of the next half-edge
            if g in half:
                break
            f = g
        rot.append(tuple(cyc))
    m = len(half) // 2
    pair, sign, branch = [0] * m, [0] * m, [""] * m
    for f, (h, b) in half.items():
        if b:
            continue
        h2, b2 = half[edge_end[f]]
        pair[h] = h2
        sign[h] = 1 if b2 == 1 else -1
        branch[h] = labels[curve[f]]
    comp = Component(rot=tuple(rot), pair=tuple(pair), sign=tuple(sign), branch=tuple(branch))
    back = {2 * h + b: f for f, (h, b) in half.items()}
    info = []
    for orbit in comp.face_orbits():
        rank = None
        for g in orbit:
            canon_flag = back[g]
            if best[5 * canon_flag + 4] >= 0:
                rank = best[5 * canon_flag + 4]
                break
        info.append(table[rank])
    return comp, info
