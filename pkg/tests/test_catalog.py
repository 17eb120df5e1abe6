import json

import pytest

from snakecoil import canon, catalog
from snakecoil.errors import DuplicateId, SchemaError

from support import ROOT, base_paths

CATALOG = f"{ROOT}/data/catalog.jsonl"


def test_shipped_catalog_loads():
    entries = catalog.load(CATALOG)
    assert [e.id for e in entries] == ["k2", "k3a", "k3b", "k4a", "k4b", "k4c", "k4d"]
    assert all(e.tags["k"] in (2, 3, 4) for e in entries)


def test_store_load_round_trip(tmp_path):
    entries = [catalog.entry_from_base(p, "synthetic", "tester", "2026-01-01") for p in base_paths()]
    path = tmp_path / "c.jsonl"
    catalog.store(entries, path)
    back = catalog.load(path)
    assert [e.to_json() for e in back] == [e.to_json() for e in entries]
    assert not (tmp_path / "c.jsonl.tmp").exists()


def _line(**over):
    obj = {"schema_version": 1, "id": "x", "format": "base",
           "text": open(base_paths()[0]).read(),
           "provenance": {"source_figure": "f", "transcriber": "t", "date": "d"}}
    obj.update(over)
    return json.dumps(obj)


@pytest.mark.parametrize("over", [
    {"schema_version": 2},
    {"format": "png"},
    {"provenance": {"source_figure": "f"}},
    {"extra": 1},
    {"text": "base k=2; word a1"},
])
def test_bad_records(tmp_path, over):
    path = tmp_path / "c.jsonl"
    path.write_text(_line(**over) + "\n")
    with pytest.raises(SchemaError) as info:
        catalog.load(path)
    assert ":1:" in str(info.value)


def test_duplicate_ids(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(_line() + "\n" + _line() + "\n")
    with pytest.raises(DuplicateId):
        catalog.load(path)


def test_data_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv("SNAKE_DATA", str(tmp_path))
    assert catalog.data_dir() == tmp_path


def test_closure_monotone_and_ranks():
    entries = catalog.load(CATALOG)
    closed = catalog.closure_remove_free_ovals(entries)
    forms = {canon.canonical_form(e.arrangement) for e in closed}
    assert {canon.canonical_form(e.arrangement) for e in entries} <= forms
    assert len(forms) == len(closed)
    chain = {e.id: e for e in closed if e.id.startswith("k4a")}
    assert sorted(chain) == ["k4a", "k4a-no-b", "k4a-no-b-c", "k4a-no-b-c-d"]
    ranks = [chain[i].arrangement.curves["C"].rank for i in sorted(chain, key=len)]
    assert ranks == [0, 1, 2, 3]
    assert chain["k4a-no-b"].provenance["derived_from"] == "k4a"
    assert chain["k4a-no-b"].arrangement.curves["C"].type == "II"


def test_closure_is_idempotent():
    once = catalog.closure_remove_free_ovals(catalog.load(CATALOG))
    twice = catalog.closure_remove_free_ovals(once)
    assert {canon.canonical_form(e.arrangement) for e in once} == {canon.canonical_form(e.arrangement) for e in twice}
