"""Shared fixtures and an independent re-presentation routine for tests."""
from __future__ import annotations

import functools
import glob
import os
import random

from snakecoil import catalog, codec, core, perturb

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SYNTH = os.path.join(ROOT, "data", "synthetic")
GRAMMAR = os.path.join(ROOT, "tests", "fixtures", "grammar")


def base_paths():
    return sorted(glob.glob(os.path.join(SYNTH, "*.base")))


@functools.lru_cache(maxsize=None)
def bases():
    return {os.path.basename(p)[:-5]: codec.compile_base(codec.load_base(p)) for p in base_paths()}


def gaps(arr):
    return range(1, len(perturb.conic_walk(arr)[1]) + 1)


@functools.lru_cache(maxsize=None)
def raw_outputs():
    """Every (base name, gap, snake arrangement), before deduplication."""
    return tuple((name, g, perturb.snake_from_conic(b, g)) for name, b in bases().items() for g in gaps(b))


@functools.lru_cache(maxsize=None)
def generated():
    return tuple(perturb.enumerate_snakes(list(bases().items())))


@functools.lru_cache(maxsize=None)
def closure_bases():
    entries = catalog.load(os.path.join(ROOT, "data", "catalog.jsonl"))
    return tuple((e.id, e.arrangement) for e in catalog.closure_remove_free_ovals(entries))


def corpus():
    """Bases, closure bases and all raw generator outputs."""
    out = list(bases().values())
    out += [a for _, a in closure_bases()]
    out += [a for _, _, a in raw_outputs()]
    return out


def _represent_component(c, rng, mirror=None):
    """Relabelled copy of a map component and the induced flag map."""
    n = c.n_vertices
    perm = list(range(n))
    rng.shuffle(perm)
    rev = [rng.random() < 0.5 if mirror is None else mirror for _ in range(n)]
    shift = [rng.randrange(4) for _ in range(n)]
    new_of = {}
    for v, cyc in enumerate(c.rot):
        order = list(cyc)
        if rev[v]:
            order = order[::-1]
        order = order[shift[v]:] + order[:shift[v]]
        for pos, h in enumerate(order):
            new_of[h] = 4 * perm[v] + pos
    m = 4 * n
    rot = [tuple(range(4 * i, 4 * i + 4)) for i in range(n)]
    pair, sign, branch = [0] * m, [0] * m, [None] * m
    vert = [c.vertex_of(h) for h in range(c.n_half)]
    for h in range(c.n_half):
        x, y = new_of[h], new_of[c.pair[h]]
        pair[x] = y
        flip = -1 if rev[vert[h]] != rev[vert[c.pair[h]]] else 1
        sign[x] = c.sign[h] * flip
        branch[x] = c.branch[h]

    def flag(f):
        h, b = divmod(f, 2)
        return 2 * new_of[h] + (b ^ int(rev[vert[h]]))

    return rot, pair, sign, branch, flag


def represent(arr: core.Arrangement, rng: random.Random, mirror=None) -> core.Arrangement:
    """A random presentation of the same arrangement.

    Components, vertices, half-edges and branch names are permuted, cyclic
    orders rotated, and a random set of vertices reversed with the matching
    edge-sign flips (all vertices reversed is a mirror image).  ``mirror``
    set to True or False reverses all vertices or none.
    """
    names = sorted(arr.branches)
    fresh = [f"z{i}" for i in range(len(names))]
    rng.shuffle(fresh)
    rename = dict(zip(names, fresh))
    order = list(range(len(arr.components)))
    rng.shuffle(order)
    where = {old: new for new, old in enumerate(order)}
    comps, face_maps = [], []
    for old in order:
        c = arr.components[old]
        if c.is_loop:
            comps.append(core.make_loop(rename[c.loop], c.twisted))
            face_maps.append(lambda f: f)
            continue
        rot, pair, sign, branch, flag = _represent_component(c, rng, mirror)
        branch = [rename[b] for b in branch]
        probe = core.Component(rot=tuple(rot), pair=tuple(pair), sign=tuple(sign), branch=tuple(branch))
        orbits = c.face_orbits()
        fmap = {i: probe.face_of_flag(flag(orb[0])) for i, orb in enumerate(orbits)}
        outer = None if c.outer is None else fmap[c.outer]
        comps.append(core.make_component(rot, pair, sign, branch, outer=outer))
        face_maps.append(fmap.__getitem__)
    parent = []
    for old in order:
        p = arr.parent[old]
        if p is None:
            parent.append(None)
            continue
        pc = where[p[0]]
        parent.append((pc, face_maps[pc](p[1])))
    branches = {rename[b]: cv for b, cv in arr.branches.items()}
    return core.build(comps, parent, dict(arr.curves), branches)


# ---------------------------------------------------------------------------
# brute-force isomorphism, independent of the canonical form


def _kids(arr):
    table = {}
    for i, p in enumerate(arr.parent):
        table.setdefault(p, []).append(i)
    return table


def _flag_maps(ca, cb):
    """Every flag bijection of ca onto cb commuting with the three involutions."""
    n = 2 * ca.n_half
    if n != 2 * cb.n_half:
        return
    ops = (lambda c, f: f ^ 1, lambda c, f: c.corner(f), lambda c, f: c.edge_end(f))
    for target in range(n):
        img = {0: target}
        stack = [0]
        ok = True
        while stack and ok:
            f = stack.pop()
            for op in ops:
                x, y = op(ca, f), op(cb, img[f])
                if x in img:
                    ok = img[x] == y
                    if not ok:
                        break
                else:
                    img[x] = y
                    stack.append(x)
        if ok and len(img) == n and len(set(img.values())) == n:
            yield img


def _faces(c):
    """Flag -> face id, from orbits of corner and edge_end."""
    face = {}
    for f0 in range(2 * c.n_half):
        if f0 in face:
            continue
        stack = [f0]
        face[f0] = f0
        while stack:
            f = stack.pop()
            for g in (c.corner(f), c.edge_end(f)):
                if g not in face:
                    face[g] = f0
                    stack.append(g)
    return face


def _match_all(xs, ys, same):
    if len(xs) != len(ys):
        return False
    if not xs:
        return True
    x = xs[0]
    for k, y in enumerate(ys):
        if same(x, y) and _match_all(xs[1:], ys[:k] + ys[k + 1:], same):
            return True
    return False


def brute_isomorphic(a, b) -> bool:
    ka, kb = _kids(a), _kids(b)

    def same(i, j):
        ca, cb = a.components[i], b.components[j]
        if ca.is_loop != cb.is_loop:
            return False
        if ca.is_loop:
            if ca.twisted != cb.twisted or a.branches[ca.loop] != b.branches[cb.loop]:
                return False
            return _match_all(ka.get((i, 0), []), kb.get((j, 0), []), same)
        fa = _faces(ca)
        orbits = sorted(set(fa.values()))
        index_a = {f: ca.face_of_flag(f) for f in orbits}
        for img in _flag_maps(ca, cb):
            if any(a.branches[ca.branch[f // 2]] != b.branches[cb.branch[img[f] // 2]] for f in img):
                continue
            good = True
            for rep in orbits:
                fi, fj = index_a[rep], cb.face_of_flag(img[rep])
                if (fi == ca.outer) != (fj == cb.outer):
                    good = False
                    break
                if not _match_all(ka.get((i, fi), []), kb.get((j, fj), []), same):
                    good = False
                    break
            if good:
                return True
        return False

    return _match_all(ka.get(None, []), kb.get(None, []), same)
