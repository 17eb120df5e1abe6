"""Mutable scratch structure for rewriting components.

Half-edges and vertices are addressed by arbitrary hashable keys so that
rewrites can mint new ones freely; :meth:`MapBuilder.component` compacts
them into an immutable :class:`~snakecoil.core.Component`.
"""
from __future__ import annotations

from .core import Component, make_component


class MapBuilder:
    def __init__(self):
        self.rot = {}
        self.pair = {}
        self.sign = {}
        self.branch = {}
        self.loops = []  # (branch, twisted)

    @classmethod
    def from_component(cls, c: Component) -> "MapBuilder":
        mb = cls()
        for v, cyc in enumerate(c.rot):
            mb.rot[v] = list(cyc)
        for h in range(c.n_half):
            mb.pair[h] = c.pair[h]
            mb.sign[h] = c.sign[h]
            mb.branch[h] = c.branch[h]
        return mb

    def vertex(self, key, halves) -> None:
        self.rot[key] = list(halves)

    def connect(self, a, b, sign: int, branch: str) -> None:
        self.pair[a], self.pair[b] = b, a
        self.sign[a] = self.sign[b] = sign
        self.branch[a] = self.branch[b] = branch

    def detach(self, h) -> None:
        del self.pair[h], self.sign[h], self.branch[h]

    def vertex_of(self, h):
        for v, cyc in self.rot.items():
            if h in cyc:
                return v
        raise KeyError(h)

    def next(self, h):
        cyc = self.rot[self.vertex_of(h)]
        return cyc[(cyc.index(h) + 1) % len(cyc)]

    def prev(self, h):
        cyc = self.rot[self.vertex_of(h)]
        return cyc[(cyc.index(h) - 1) % len(cyc)]

    def edge_end(self, flag):
        h, b = flag
        return (self.pair[h], 1 - b if self.sign[h] > 0 else b)

    def smooth(self, vkey, pairs) -> None:
        """Remove a vertex, joining each given pair of its half-edges into one arc.

        The joined arc keeps the branch of the first half-edge; an arc closing
        on itself becomes a crossing-free loop.
        """
        del self.rot[vkey]
        for h1, h2 in pairs:
            x, y = self.pair[h1], self.pair[h2]
            s = self.sign[h1] * self.sign[h2]
            br = self.branch[h1]
            if x == h2:
                self.loops.append((br, self.sign[h1] < 0))
                self.detach(h1)
                self.detach(h2)
                continue
            self.detach(h1)
            self.detach(h2)
            self.connect(x, y, s, br)

    def component(self, outer_flag=None, relabel=None):
        """Compact into a Component; returns ``(component, half-edge index)``."""
        index = {}
        rot = []
        for v in self.rot:
            cyc = self.rot[v]
            for h in cyc:
                index[h] = len(index)
            rot.append(tuple(index[h] for h in cyc))
        n = len(index)
        pair, sign, branch = [0] * n, [0] * n, [""] * n
        for h, i in index.items():
            pair[i] = index[self.pair[h]]
            sign[i] = self.sign[h]
            br = self.branch[h]
            branch[i] = relabel.get(br, br) if relabel else br
        outer = None
        probe = Component(rot=tuple(rot), pair=tuple(pair), sign=tuple(sign), branch=tuple(branch))
        if not probe.one_sided and outer_flag is not None:
            h, b = outer_flag
            outer = probe.face_of_flag(2 * index[h] + b)
        return make_component(rot, pair, sign, branch, outer=outer), index

    def face_index(self, comp: Component, index: dict, flag) -> int:
        h, b = flag
        return comp.face_of_flag(2 * index[h] + b)
