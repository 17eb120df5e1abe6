"""Text formats: high-level ``.base`` files, low-level ``.armap`` maps, snake codes.

Both formats are line oriented; ``;`` also ends a statement and ``#`` starts
a comment.  See ``docs/grammar.md`` for the grammar.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from . import core
from .core import Arrangement, Curve, make_component, make_loop
from .errors import (AmbiguousEmbedding, ArrangementError, InvalidWord, NonTransverseVertex,
                     ParseError)

CONIC = "Q"
CONIC_BRANCH = "q"
OTHER = "C"

_TOKEN = re.compile(r"\s*(?:(#.*)|(\()|(\))|(;)|([^\s();#]+))")
_LABEL = re.compile(r"^([A-Za-z_]+)(\d+)$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")


@dataclass
class Token:
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    """Split into statements (lists of tokens); parentheses are single tokens."""
    statements = []
    current = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        pos = 0
        while pos < len(raw):
            m = _TOKEN.match(raw, pos)
            if m is None or m.end() == pos:
                if raw[pos:].strip() == "":
                    break
                raise ParseError(f"unexpected character {raw[pos]!r}", lineno, pos + 1)
            pos = m.end()
            if m.group(1) is not None:
                break
            if m.group(4) is not None:
                if current:
                    statements.append(current)
                current = []
                continue
            tok = m.group(2) or m.group(3) or m.group(5)
            if tok is None:
                continue
            start = m.start(2) if m.group(2) else m.start(3) if m.group(3) else m.start(5)
            current.append(Token(tok, lineno, start + 1))
        if current:
            statements.append(current)
            current = []
    return statements


def _eof(statements, text):
    lines = text.splitlines() or [""]
    return ParseError("unexpected end of input", len(lines), len(lines[-1]) + 1)


def _kv(tok: Token, allowed) -> tuple:
    if "=" not in tok.text:
        raise ParseError(f"expected key=value, got {tok.text!r}", tok.line, tok.col)
    k, v = tok.text.split("=", 1)
    if k not in allowed:
        raise ParseError(f"unknown attribute {k!r}", tok.line, tok.col)
    return k, v


def _int(tok: Token, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"expected an integer, got {text!r}", tok.line, tok.col) from None


def _curve_from(tokens, line_tok) -> Curve:
    if len(tokens) < 2:
        raise ParseError("curve needs a label", line_tok.line, line_tok.col + len(line_tok.text))
    label = tokens[1].text
    if not _IDENT.match(label):
        raise ParseError(f"bad curve label {label!r}", tokens[1].line, tokens[1].col)
    attrs = {"degree": None, "rank": None, "type": None}
    nodal = False
    for tok in tokens[2:]:
        if tok.text == "nodal":
            nodal = True
            continue
        k, v = _kv(tok, attrs)
        attrs[k] = v
        if k in ("degree", "rank"):
            attrs[k] = _int(tok, v)
        elif v not in ("I", "II", "unknown"):
            raise ParseError(f"type must be I, II or unknown, got {v!r}", tok.line, tok.col)
    if attrs["degree"] is None:
        raise ParseError("curve needs degree=", tokens[0].line, tokens[0].col)
    typ = None if attrs["type"] in (None, "unknown") else attrs["type"]
    return Curve(label, attrs["degree"], attrs["rank"], typ, nodal)


# ---------------------------------------------------------------------------
# base arrangements


@dataclass
class BranchSpec:
    name: str
    kind: str  # "oval" | "pseudoline"
    arcs: list = field(default_factory=list)  # (from_label, to_label, tag)
    free: bool = False
    place: Optional[tuple] = None
    token: Optional[Token] = None


@dataclass
class BaseArrangement:
    """A conic against a curve of degree k, all 2k crossings on the conic."""

    k: int
    word: list
    branches: dict
    curve: Curve
    source: str = ""

    @property
    def crossed(self) -> list:
        return [b for b in self.branches.values() if not b.free]


_TAGS = ("in", "out", "inf", "out?")


def parse_base(text: str) -> BaseArrangement:
    statements = tokenize(text)
    if not statements:
        raise _eof(statements, text)
    head = statements[0]
    if head[0].text != "base":
        raise ParseError(f"expected 'base', got {head[0].text!r}", head[0].line, head[0].col)
    if len(head) != 2:
        t = head[-1]
        raise ParseError("expected 'base k=<int>'", t.line, t.col + len(t.text))
    _, kv = _kv(head[1], ("k",))
    k = _int(head[1], kv)
    if k < 1:
        raise ParseError("k must be positive", head[1].line, head[1].col)
    word = None
    word_tok = None
    branches = {}
    curve = Curve(OTHER, k)
    for st in statements[1:]:
        kw = st[0]
        if kw.text == "word":
            if word is not None:
                raise ParseError("duplicate word", kw.line, kw.col)
            word = [t.text for t in st[1:]]
            word_tok = st
            for t in st[1:]:
                if not _LABEL.match(t.text):
                    raise ParseError(f"bad crossing label {t.text!r}", t.line, t.col)
            if len(word) != 2 * k:
                raise InvalidWord(f"word has {len(word)} labels, expected 2k = {2 * k}", kw.line, kw.col)
            if len(set(word)) != len(word):
                raise InvalidWord("crossing labels repeat", kw.line, kw.col)
        elif kw.text == "curve":
            curve = _curve_from(st, kw)
            if curve.label != OTHER or curve.degree != k:
                raise ParseError(f"curve must be '{OTHER} degree={k}'", st[1].line, st[1].col)
        elif kw.text == "branch":
            b = _parse_branch(st)
            if b.name in branches or b.name == CONIC_BRANCH:
                raise ParseError(f"duplicate branch {b.name!r}", st[1].line, st[1].col)
            branches[b.name] = b
        elif kw.text == "place":
            if len(st) < 3:
                t = st[-1]
                raise ParseError("place needs a branch and a location", t.line, t.col + len(t.text))
            name = st[1].text
            if name not in branches:
                raise ParseError(f"unknown branch {name!r}", st[1].line, st[1].col)
            branches[name].place = _parse_place(st[2:])
            branches[name].free = True
        else:
            raise ParseError(f"unknown statement {kw.text!r}", kw.line, kw.col)
    if word is None:
        raise _eof(statements, text)
    counts = {}
    for lab in word:
        counts[_LABEL.match(lab).group(1)] = counts.get(_LABEL.match(lab).group(1), 0) + 1
    for name, n in counts.items():
        if n % 2:
            raise InvalidWord(f"branch {name} meets the conic an odd number of times",
                              word_tok[0].line, word_tok[0].col)
        if name not in branches:
            raise InvalidWord(f"word mentions undeclared branch {name}", word_tok[0].line, word_tok[0].col)
    for b in branches.values():
        labels = [lab for lab in word if _LABEL.match(lab).group(1) == b.name]
        if b.free:
            if labels or b.arcs:
                raise InvalidWord(f"free branch {b.name} has crossings", b.token.line, b.token.col)
            if b.place is None and b.kind == "oval":
                raise ParseError(f"free oval {b.name} lacks a place statement", b.token.line, b.token.col)
            continue
        _check_arcs(b, labels)
    return BaseArrangement(k, word, branches, curve, text)


def _parse_branch(st) -> BranchSpec:
    if len(st) < 3:
        t = st[-1]
        raise ParseError("branch needs a name and a kind", t.line, t.col + len(t.text))
    name, kind = st[1].text, st[2].text
    if not re.match(r"^[A-Za-z_]+$", name):
        raise ParseError(f"branch names are letters only, got {name!r}", st[1].line, st[1].col)
    if kind not in ("oval", "pseudoline"):
        raise ParseError(f"branch kind must be oval or pseudoline, got {kind!r}", st[2].line, st[2].col)
    b = BranchSpec(name, kind, token=st[1])
    rest = st[3:]
    if not rest:
        raise ParseError("branch needs 'arcs ...' or 'free'", st[2].line, st[2].col + len(st[2].text))
    if rest[0].text == "free":
        if len(rest) > 1:
            raise ParseError("unexpected token after 'free'", rest[1].line, rest[1].col)
        b.free = True
        return b
    if rest[0].text != "arcs":
        raise ParseError(f"expected 'arcs' or 'free', got {rest[0].text!r}", rest[0].line, rest[0].col)
    i = 1
    while i < len(rest):
        t = rest[i]
        if t.text != "(":
            raise ParseError(f"expected '(', got {t.text!r}", t.line, t.col)
        if i + 3 >= len(rest):
            last = rest[-1]
            raise ParseError("unterminated arc", last.line, last.col + len(last.text))
        span, tag, close = rest[i + 1], rest[i + 2], rest[i + 3]
        if close.text != ")":
            raise ParseError(f"expected ')', got {close.text!r}", close.line, close.col)
        if span.text.count("-") != 1:
            raise ParseError(f"arc must look like a1-a2, got {span.text!r}", span.line, span.col)
        x, y = span.text.split("-")
        for lab in (x, y):
            m = _LABEL.match(lab)
            if not m or m.group(1) != name:
                raise ParseError(f"arc endpoint {lab!r} is not a crossing of branch {name}", span.line, span.col)
        if tag.text not in _TAGS:
            raise ParseError(f"arc side must be one of {', '.join(_TAGS)}, got {tag.text!r}", tag.line, tag.col)
        b.arcs.append((x, y, tag.text, span))
        i += 4
    if not b.arcs:
        raise ParseError("branch has no arcs", rest[0].line, rest[0].col + len(rest[0].text))
    return b


def _parse_place(toks) -> tuple:
    t = toks[0]
    words = [x.text for x in toks]
    if words == ["root"]:
        return ("root",)
    if len(words) == 2 and words[0] == "inside":
        return ("inside", words[1], toks[1])
    if len(words) == 3 and words[0] == "in" and words[1] == "face":
        return ("face", _int(toks[2], words[2]))
    if len(words) == 4 and words[:2] == ["in", "gap"] and words[3] in ("in", "out"):
        return ("gap", _int(toks[2], words[2]), words[3])
    raise ParseError("place must be 'root', 'inside <branch>', 'in face <n>' or 'in gap <i> in|out'",
                     t.line, t.col)


def _check_arcs(b: BranchSpec, labels) -> None:
    ends = [a[0] for a in b.arcs]
    if sorted(ends) != sorted(labels):
        span = b.arcs[0][3]
        raise InvalidWord(f"arcs of {b.name} must visit each of its crossings once", span.line, span.col)
    for (x, y, tag, span), nxt in zip(b.arcs, b.arcs[1:] + b.arcs[:1]):
        if y != nxt[0]:
            raise InvalidWord(f"arc {x}-{y} is not followed by an arc starting at {y}", span.line, span.col)
    kinds = ["in" if a[2] == "in" else "out" for a in b.arcs]
    for (x, y, tag, span), k1, k2 in zip(b.arcs, kinds, kinds[1:] + kinds[:1]):
        if k1 == k2:
            raise InvalidWord(f"arc sides must alternate along {b.name} (at {y})", span.line, span.col)


def compile_base(base: BaseArrangement) -> Arrangement:
    """Build the conic-vs-curve arrangement described by ``base``.

    Crossing ``i`` of the word is vertex ``i`` with half-edges, in order,
    forward along the conic, into the conic disk, backward, out of it.
    """
    n = len(base.word)
    index = {lab: i for i, lab in enumerate(base.word)}
    pair = [None] * (4 * n)
    sign = [1] * (4 * n)
    branch = [None] * (4 * n)
    rot = [(4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3) for i in range(n)]
    for i in range(n):
        j = (i + 1) % n
        pair[4 * i], pair[4 * j + 2] = 4 * j + 2, 4 * i
        branch[4 * i] = branch[4 * j + 2] = CONIC_BRANCH
    hugs = []
    open_hugs = []
    chords = []
    for b in base.crossed:
        for x, y, tag, span in b.arcs:
            i, j = index[x], index[y]
            off = 1 if tag == "in" else 3
            hx, hy = 4 * i + off, 4 * j + off
            pair[hx], pair[hy] = hy, hx
            branch[hx] = branch[hy] = b.name
            if tag == "inf":
                sign[hx] = sign[hy] = -1
            elif tag == "out":
                hugs.append(hx)
            elif tag == "out?":
                open_hugs.append(hx)
            else:
                chords.append((i, j, b.name))
    for a in range(len(chords)):
        for c in range(a + 1, len(chords)):
            if _interleave(chords[a][:2], chords[c][:2], n):
                raise NonTransverseVertex(
                    f"chords of {chords[a][2]} and {chords[c][2]} cross inside the conic")
    curves = {CONIC: Curve(CONIC, 2, 0, "I"), OTHER: base.curve}
    probe = core.Component(rot=tuple(rot), pair=tuple(pair), sign=tuple(sign), branch=tuple(branch))
    if probe.one_sided:
        candidates = [None]
    else:
        candidates = _infinity_faces(probe, hugs, n)
    results = {}
    from .canon import canonical_form
    for outer in candidates:
        main = make_component(rot, pair, sign, branch, outer=outer)
        arr = _assemble(base, main, curves)
        results.setdefault(canonical_form(arr), arr)
    if len(results) > 1:
        raise AmbiguousEmbedding(
            f"{len(results)} non-isotopic embeddings fit the arc data; pin sides with 'out'")
    if not results:
        raise ArrangementError("no embedding fits the arc data")
    return next(iter(results.values()))


def _interleave(a, b, n) -> bool:
    x, y = sorted(a)
    return (x < b[0] < y) != (x < b[1] < y) and len({*a, *b}) == 4


def _infinity_faces(comp, hugs, n) -> list:
    """Outside faces that may contain the cross-cap given the hugging arcs."""
    outside = sorted({comp.face_of_flag(2 * (4 * i) + 1) for i in range(n)})
    arcs = [h for h in range(comp.n_half) if h % 4 == 3 and h < comp.pair[h]]
    adj = {f: [] for f in outside}
    for h in arcs:
        a, b = comp.face_of_flag(2 * h), comp.face_of_flag(2 * h + 1)
        if a in adj and b in adj:
            adj[a].append((b, h))
            adj[b].append((a, h))
    allowed = set(outside)
    for h in hugs:
        far = comp.face_of_flag(2 * h + 1)
        side = {far}
        stack = [far]
        while stack:
            f = stack.pop()
            for g, e in adj.get(f, []):
                if e in (h, comp.pair[h]) or g in side:
                    continue
                side.add(g)
                stack.append(g)
        allowed &= side
    if not allowed:
        raise ArrangementError("hugging sides of the outside arcs are inconsistent")
    return sorted(allowed)


def _assemble(base, main, curves) -> Arrangement:
    comps = [main]
    parent = [None]
    branches = {CONIC_BRANCH: CONIC}
    for b in base.branches.values():
        branches[b.name] = OTHER
    pending = {}
    for b in base.branches.values():
        if not b.free:
            continue
        if b.kind == "pseudoline":
            comps.append(make_loop(b.name, twisted=True))
            parent.append(None)
            pending[b.name] = len(comps) - 1
            continue
        comps.append(make_loop(b.name))
        parent.append(b.place)
        pending[b.name] = len(comps) - 1
    n = len(base.word)
    pseudo = [i for i, c in enumerate(comps) if c.twisted]
    for i, p in enumerate(parent):
        if i == 0 or comps[i].twisted:
            continue
        if p[0] == "root":
            parent[i] = (pseudo[0], 0) if pseudo else None
        elif p[0] == "face":
            parent[i] = (0, p[1])
        elif p[0] == "gap":
            g, side = p[1], p[2]
            if not 1 <= g <= n:
                raise ArrangementError(f"gap {g} out of range 1..{n}")
            parent[i] = (0, main.face_of_flag(2 * (4 * (g - 1)) + (0 if side == "in" else 1)))
        elif p[0] == "inside":
            if p[1] not in pending or comps[pending[p[1]]].twisted:
                tok = p[2]
                raise ParseError(f"{p[1]!r} is not a free oval", tok.line, tok.col)
            parent[i] = (pending[p[1]], 0)
    if pseudo and parent[0] is None:
        parent[0] = (pseudo[0], 0)
    return core.build(comps, parent, curves, branches)


def load_base(path) -> BaseArrangement:
    with open(path, encoding="utf-8") as fh:
        base = parse_base(fh.read())
    base.source = str(path)
    return base


# ---------------------------------------------------------------------------
# low-level maps


def serialize(arr: Arrangement) -> str:
    lines = ["armap 1"]
    for label in sorted(arr.curves):
        c = arr.curves[label]
        parts = [f"curve {label} degree={c.degree}"]
        if c.rank is not None:
            parts.append(f"rank={c.rank}")
        if c.type is not None:
            parts.append(f"type={c.type}")
        if c.nodal:
            parts.append("nodal")
        lines.append(" ".join(parts))
    for b in sorted(arr.branches):
        lines.append(f"branch {b} {arr.branches[b]}")
    for i, (c, p) in enumerate(zip(arr.components, arr.parent)):
        where = "" if p is None else f" in {p[0]}:{p[1]}"
        if c.is_loop:
            kind = "pseudoline" if c.twisted else "oval"
            lines.append(f"loop {i} {c.loop} {kind}{where}")
            continue
        outer = "" if c.outer is None else f" outer {c.outer}"
        lines.append(f"comp {i}{where}{outer}")
        for cyc in c.rot:
            lines.append("v " + " ".join(str(h) for h in cyc))
        for h in c.edges():
            s = "+" if c.sign[h] > 0 else "-"
            lines.append(f"e {h} {c.pair[h]} {s} {c.branch[h]}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_map(text: str) -> Arrangement:
    statements = tokenize(text)
    if not statements:
        raise _eof(statements, text)
    head = statements[0]
    if [t.text for t in head] != ["armap", "1"]:
        raise ParseError("expected 'armap 1'", head[0].line, head[0].col)
    curves, branches = {}, {}
    comps = []  # [kind, data, place, token]
    ended = False
    for st in statements[1:]:
        kw = st[0]
        if ended:
            raise ParseError("content after 'end'", kw.line, kw.col)
        if kw.text == "curve":
            c = _curve_from(st, kw)
            curves[c.label] = c
        elif kw.text == "branch":
            if len(st) != 3:
                raise ParseError("expected 'branch <name> <curve>'", kw.line, kw.col)
            branches[st[1].text] = st[2].text
        elif kw.text in ("comp", "loop"):
            if len(st) < 2:
                raise ParseError(f"{kw.text} needs an index", kw.line, kw.col + len(kw.text))
            idx = _int(st[1], st[1].text)
            if idx != len(comps):
                raise ParseError(f"expected component index {len(comps)}", st[1].line, st[1].col)
            rest = st[2:]
            rec = {"kind": kw.text, "rot": [], "edges": [], "place": None, "outer": None, "tok": kw}
            if kw.text == "loop":
                if len(rest) < 2 or rest[1].text not in ("oval", "pseudoline"):
                    t = rest[-1] if rest else st[1]
                    raise ParseError("expected 'loop <i> <branch> oval|pseudoline'", t.line, t.col)
                rec["branch"] = rest[0].text
                rec["twisted"] = rest[1].text == "pseudoline"
                rest = rest[2:]
            j = 0
            while j < len(rest):
                t = rest[j]
                if t.text == "in" and j + 1 < len(rest):
                    m = re.match(r"^(\d+):(\d+)$", rest[j + 1].text)
                    if not m:
                        raise ParseError("expected <comp>:<face>", rest[j + 1].line, rest[j + 1].col)
                    rec["place"] = (int(m.group(1)), int(m.group(2)))
                    j += 2
                elif t.text == "outer" and j + 1 < len(rest):
                    rec["outer"] = _int(rest[j + 1], rest[j + 1].text)
                    j += 2
                else:
                    raise ParseError(f"unexpected token {t.text!r}", t.line, t.col)
            comps.append(rec)
        elif kw.text == "v":
            if not comps or comps[-1]["kind"] != "comp":
                raise ParseError("vertex outside a comp block", kw.line, kw.col)
            if len(st) != 5:
                raise ParseError("a vertex lists four half-edges", kw.line, kw.col)
            comps[-1]["rot"].append(tuple(_int(t, t.text) for t in st[1:]))
        elif kw.text == "e":
            if not comps or comps[-1]["kind"] != "comp":
                raise ParseError("edge outside a comp block", kw.line, kw.col)
            if len(st) != 5:
                raise ParseError("expected 'e <h> <h> +|- <branch>'", kw.line, kw.col)
            if st[3].text not in ("+", "-"):
                raise ParseError(f"edge sign must be + or -, got {st[3].text!r}", st[3].line, st[3].col)
            comps[-1]["edges"].append((_int(st[1], st[1].text), _int(st[2], st[2].text),
                                       1 if st[3].text == "+" else -1, st[4].text))
        elif kw.text == "end":
            ended = True
        else:
            raise ParseError(f"unknown statement {kw.text!r}", kw.line, kw.col)
    if not ended:
        raise _eof(statements, text)
    built, parent = [], []
    for rec in comps:
        parent.append(rec["place"])
        if rec["kind"] == "loop":
            built.append(make_loop(rec["branch"], rec["twisted"]))
            continue
        n = 4 * len(rec["rot"])
        pair, sign, branch = [None] * n, [0] * n, [None] * n
        for a, b, s, br in rec["edges"]:
            if not (0 <= a < n and 0 <= b < n):
                t = rec["tok"]
                raise ParseError(f"edge {a}-{b} out of range", t.line, t.col)
            pair[a], pair[b] = b, a
            sign[a] = sign[b] = s
            branch[a] = branch[b] = br
        if None in pair:
            t = rec["tok"]
            raise ParseError("some half-edges are unpaired", t.line, t.col)
        comp = core.Component(rot=tuple(rec["rot"]), pair=tuple(pair), sign=tuple(sign),
                              branch=tuple(branch), outer=rec["outer"])
        if comp.one_sided and rec["outer"] is not None:
            comp = core.Component(rot=comp.rot, pair=comp.pair, sign=comp.sign, branch=comp.branch)
        built.append(comp)
    return core.build(built, parent, curves, branches)


def load_map(path) -> Arrangement:
    with open(path, encoding="utf-8") as fh:
        return parse_map(fh.read())


# ---------------------------------------------------------------------------
# snake codes

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def _dihedral_min(seq):
    n = len(seq)
    best = None
    for s in (list(seq), list(reversed(seq))):
        for r in range(n):
            cand = tuple(s[r:] + s[:r])
            if best is None or cand < best:
                best = cand
    return best or ()


def snake_code(arr: Arrangement, witness) -> str:
    """Crossings of the snake numbered along the snake, listed along each coiled branch.

    Groups (one per coiled branch) are separated by ``/``.  The result is
    minimised over where the numbering starts and its direction, and over
    the start and direction of each group, so it does not depend on branch
    names or on reflection.
    """
    ci = arr.locate(witness.oval)
    c = arr.components[ci]
    along = c.strands()[witness.oval][0]
    snake_vs = [c.vertex_of(h) for h in along]
    n = len(snake_vs)
    groups = []
    for b in witness.coiled:
        walk = c.strands()[b][0]
        groups.append([c.vertex_of(h) for h in walk if c.vertex_of(h) in snake_vs])
    best = None
    for direction in (1, -1):
        for r in range(n):
            pos = {}
            for i in range(n):
                pos[snake_vs[(r + direction * i) % n]] = i + 1
            cand = tuple(sorted(_dihedral_min([pos[v] for v in g]) for g in groups))
            if best is None or cand < best:
                best = cand
    if n < len(_DIGITS):
        return "/".join("".join(_DIGITS[i] for i in g) for g in best)
    return "/".join(".".join(str(i) for i in g) for g in best)
