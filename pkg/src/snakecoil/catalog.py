"""JSON-lines catalogue of base arrangements and generated results."""
from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import jsonschema

from . import codec, core
from .canon import canonical_form
from .curves import bezout_audit, free_branches
from .errors import ArrangementError, DuplicateId, SchemaError

SCHEMA_VERSION = 1

ENTRY_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "id", "format", "text", "provenance"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "id": {"type": "string", "minLength": 1},
        "format": {"enum": ["base", "armap"]},
        "text": {"type": "string"},
        "provenance": {
            "type": "object",
            "required": ["source_figure", "transcriber", "date"],
            "properties": {
                "source_figure": {"type": "string"},
                "panel": {"type": ["integer", "null"]},
                "transcriber": {"type": "string"},
                "date": {"type": "string"},
                "derived_from": {"type": "string"},
                "removed": {"type": "array", "items": {"type": "string"}},
            },
        },
        "tags": {"type": "object"},
        "realizable": {"type": "boolean"},
    },
    "additionalProperties": False,
}


def data_dir(default="data") -> Path:
    return Path(os.environ.get("SNAKE_DATA", default))


@dataclass
class CatalogEntry:
    id: str
    format: str
    text: str
    provenance: dict
    tags: dict = field(default_factory=dict)
    realizable: bool = True
    _arr: Optional[core.Arrangement] = field(default=None, repr=False, compare=False)

    @property
    def arrangement(self) -> core.Arrangement:
        if self._arr is None:
            if self.format == "base":
                self._arr = codec.compile_base(codec.parse_base(self.text))
            else:
                self._arr = codec.parse_map(self.text)
        return self._arr

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "id": self.id, "format": self.format,
                "text": self.text, "provenance": self.provenance, "tags": self.tags,
                "realizable": self.realizable}


def compute_tags(arr: core.Arrangement, curve: str = codec.OTHER) -> dict:
    c = arr.curves.get(curve)
    crossed = [b for b in arr.branches_of(curve) if b not in free_branches(arr, curve)]
    return {"k": c.degree if c else None, "crossed": len(crossed),
            "rank": c.rank if c else None, "type": c.type if c else None}


def entry_from_dict(obj: dict, where: str = "") -> CatalogEntry:
    try:
        jsonschema.validate(obj, ENTRY_SCHEMA)
    except jsonschema.ValidationError as e:
        raise SchemaError(f"{where}{e.message}") from e
    entry = CatalogEntry(obj["id"], obj["format"], obj["text"], obj["provenance"],
                         obj.get("tags", {}), obj.get("realizable", True))
    try:
        arr = entry.arrangement
    except ArrangementError as e:
        raise SchemaError(f"{where}entry {entry.id}: {e}") from e
    over = [b for b in bezout_audit(arr) if not b.ok]
    if over:
        raise SchemaError(f"{where}entry {entry.id}: curves {over[0].curves} cross more than Bezout allows")
    return entry


def load(path) -> list:
    entries = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f"{path}:{lineno}: {e.msg}") from e
            entry = entry_from_dict(obj, f"{path}:{lineno}: ")
            if entry.id in seen:
                raise DuplicateId(f"{path}:{lineno}: duplicate id {entry.id!r}")
            seen.add(entry.id)
            entries.append(entry)
    return entries


def store(entries, path) -> None:
    ids = [e.id for e in entries]
    dup = {i for i in ids if ids.count(i) > 1}
    if dup:
        raise DuplicateId(f"duplicate id {sorted(dup)[0]!r}")
    lines = [json.dumps(e.to_json(), sort_keys=True, ensure_ascii=False) for e in entries]
    tmp = Path(str(path) + ".tmp")
    tmp.write_text("".join(x + "\n" for x in lines), encoding="utf-8")
    tmp.replace(path)


def entry_from_base(path, source_figure: str, transcriber: str, date: str,
                    panel: Optional[int] = None) -> CatalogEntry:
    text = Path(path).read_text(encoding="utf-8")
    entry = CatalogEntry(Path(path).stem, "base", text,
                         {"source_figure": source_figure, "panel": panel,
                          "transcriber": transcriber, "date": date})
    entry.tags = compute_tags(entry.arrangement)
    return entry


def remove_free_ovals(arr: core.Arrangement, names, curve: str = codec.OTHER) -> core.Arrangement:
    """Delete free loops of ``curve``; the curve's rank grows by their number."""
    drop = [arr.locate(b) for b in names]
    curves = dict(arr.curves)
    c = curves[curve]
    if c.rank is not None and drop:
        rank = c.rank + len(drop)
        # a Type I curve has even rank; otherwise the type is no longer known
        curves[curve] = replace(c, rank=rank, type="II" if rank % 2 else None)
    return core.drop_components(arr, drop, curves)


def closure_remove_free_ovals(entries, curve: str = codec.OTHER) -> list:
    """Every entry together with all its free-oval removals, one per isotopy type."""
    out = []
    seen = set()
    for e in entries:
        arr = e.arrangement
        frees = [b for b in free_branches(arr, curve)
                 if arr.components[arr.locate(b)].is_loop and not arr.components[arr.locate(b)].twisted]
        for size in range(len(frees) + 1):
            for subset in itertools.combinations(frees, size):
                derived = remove_free_ovals(arr, subset, curve) if subset else arr
                cf = canonical_form(derived)
                if cf in seen:
                    continue
                seen.add(cf)
                if not subset:
                    out.append(e)
                    continue
                prov = dict(e.provenance)
                prov["derived_from"] = e.id
                prov["removed"] = list(subset)
                d = CatalogEntry(f"{e.id}-no-{'-'.join(subset)}", "armap", codec.serialize(derived),
                                 prov, compute_tags(derived, curve), e.realizable, derived)
                out.append(d)
    return out
