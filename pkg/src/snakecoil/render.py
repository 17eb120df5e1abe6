"""Schematic SVG pictures in the disk model of the projective plane.

The picture is drawn from the canonical tree, so isotopic arrangements
give byte-identical output.  Crossing components are laid out by
barycentric (Tutte) placement; strands leaving through the dashed boundary
re-enter at the antipodal point.
"""
from __future__ import annotations

import math

import numpy as np

from .canon import canonical_tree, decode_component
from .core import Arrangement

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class _Canvas:
    def __init__(self, colours):
        self.items = []
        self.colours = colours

    def colour(self, curve):
        return self.colours.get(curve, "#000000")

    def circle(self, x, y, r, curve):
        self.items.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r:.2f}" fill="none" '
                          f'stroke="{self.colour(curve)}" stroke-width="1.5"/>')

    def path(self, pts, curve):
        d = " ".join(("M" if i == 0 else "L") + f"{x:.2f},{y:.2f}" for i, (x, y) in enumerate(pts))
        self.items.append(f'<path d="{d}" fill="none" stroke="{self.colour(curve)}" stroke-width="1.5"/>')

    def dot(self, x, y):
        self.items.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="#000000"/>')


def _row(canvas, codes, cx, cy, r):
    codes = list(codes)
    if not codes:
        return
    n = len(codes)
    rr = r / n
    for i, code in enumerate(codes):
        _draw(canvas, code, cx - r + (2 * i + 1) * rr, cy, 0.85 * rr)


def _draw(canvas, code, cx, cy, r, root=False):
    kind = code[0]
    if kind == "L":
        _, curve, twisted, inside = code
        if twisted:
            canvas.path([(cx - r, cy), (cx + r, cy)], curve)
            _row(canvas, inside, cx, cy - r / 2, r / 2)
            return
        canvas.circle(cx, cy, r, curve)
        _row(canvas, inside, cx, cy, 0.7 * r)
        return
    if kind == "R":
        _row(canvas, code[1], cx, cy, r)
        return
    _draw_map(canvas, code, cx, cy, r, root)


def _draw_map(canvas, code, cx, cy, r, root):
    comp, info = decode_component(code)
    nv = comp.n_vertices
    edges = comp.edges()
    node = {}  # ("v", i) | ("d", h) -> index
    for v in range(nv):
        node[("v", v)] = len(node)
    for h in edges:
        node[("d", h)] = len(node)
        node[("d", comp.pair[h])] = len(node)
    vert = [comp.vertex_of(h) for h in range(comp.n_half)]
    adj = {i: [] for i in range(len(node))}

    def link(a, b):
        adj[node[a]].append(node[b])
        adj[node[b]].append(node[a])

    fixed = {}
    cut = set()
    if comp.one_sided:
        orient = {0: 1}
        order = [0]
        tree = set()
        for v in order:
            for h in comp.rot[v]:
                w = vert[comp.pair[h]]
                if w not in orient:
                    orient[w] = orient[v] * comp.sign[h]
                    tree.add(min(h, comp.pair[h]))
                    order.append(w)
        cut = [h for h in edges if h not in tree and orient[vert[h]] * orient[vert[comp.pair[h]]] * comp.sign[h] < 0]
        for j, h in enumerate(cut):
            t = math.pi * j / len(cut)
            fixed[node[("d", h)]] = (cx + r * math.cos(t), cy - r * math.sin(t))
            fixed[node[("d", comp.pair[h])]] = (cx - r * math.cos(t), cy + r * math.sin(t))
    else:
        outer = next(i for i, x in enumerate(info) if x == ("outer",))
        ring = []
        orbit = comp.face_orbits()[outer]
        for g in orbit[1::2]:
            h = g // 2
            for key in (("v", vert[h]), ("d", h), ("d", comp.pair[h])):
                if node[key] not in ring:
                    ring.append(node[key])
        for j, i in enumerate(ring):
            t = 2 * math.pi * j / len(ring)
            fixed[i] = (cx + r * math.cos(t), cy - r * math.sin(t))
    for h in edges:
        m = comp.pair[h]
        link(("v", vert[h]), ("d", h))
        link(("d", m), ("v", vert[m]))
        if h not in cut:
            link(("d", h), ("d", m))
    pos = _tutte(adj, fixed, len(node), cx, cy)
    for h in edges:
        m = comp.pair[h]
        a, b = pos[node[("v", vert[h])]], pos[node[("v", vert[m])]]
        da, db = pos[node[("d", h)]], pos[node[("d", m)]]
        if h in cut:
            canvas.path([a, da], comp.branch[h])
            canvas.path([db, b], comp.branch[h])
        else:
            canvas.path([a, da, db, b], comp.branch[h])
    for v in range(nv):
        canvas.dot(*pos[node[("v", v)]])
    for fi, entry in enumerate(info):
        if entry == ("outer",) or len(entry) == 1:
            continue
        pts = [pos[node[("v", vert[g // 2])]] for g in comp.face_orbits()[fi][1::2]]
        fx = sum(p[0] for p in pts) / len(pts)
        fy = sum(p[1] for p in pts) / len(pts)
        _row(canvas, entry[1:], fx, fy, 0.12 * r)


def _tutte(adj, fixed, n, cx, cy):
    a = np.zeros((n, n))
    bx = np.zeros(n)
    by = np.zeros(n)
    for i in range(n):
        if i in fixed:
            a[i, i] = 1.0
            bx[i], by[i] = fixed[i]
            continue
        nb = adj[i]
        a[i, i] = len(nb) + 1e-6
        for j in nb:
            a[i, j] -= 1.0
        bx[i], by[i] = 1e-6 * cx, 1e-6 * cy
    xs = np.linalg.lstsq(a, bx, rcond=None)[0]
    ys = np.linalg.lstsq(a, by, rcond=None)[0]
    return [(float(x), float(y)) for x, y in zip(xs, ys)]


def render_svg(arr: Arrangement, size: int = 400) -> str:
    tree = canonical_tree(arr)
    colours = {c: PALETTE[i % len(PALETTE)] for i, c in enumerate(sorted(arr.curves))}
    canvas = _Canvas(colours)
    c = size / 2
    r = 0.45 * size
    _draw(canvas, tree, c, c, r if tree[0] != "R" else 0.8 * r, root=True)
    legend = [f'<text x="8" y="{16 + 14 * i}" font-size="11" fill="{colours[k]}">{k}</text>'
              for i, k in enumerate(sorted(colours))]
    body = "\n".join(canvas.items + legend)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">\n'
            f'<circle cx="{c:.2f}" cy="{c:.2f}" r="{r:.2f}" fill="none" stroke="#888888" '
            f'stroke-dasharray="6,4"/>\n{body}\n</svg>\n')
