"""Command line front end.

Exit status: 0 success, 1 validation failure, 2 usage error.  Output is
assembled in memory and written only once a command has succeeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import canon, catalog, codec, core, curves, perturb, render, restrict
from .errors import ArrangementError


class Failure(Exception):
    """A check ran and did not pass."""


def load_any(path) -> core.Arrangement:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix == ".base" or text.lstrip().startswith("base"):
            return codec.compile_base(codec.parse_base(text))
        return codec.parse_map(text)
    except ArrangementError as e:
        raise ArrangementError(f"{path}:{e}") from e


def _named_bases(paths, closure: bool):
    entries = []
    for p in paths:
        p = Path(p)
        if p.suffix == ".jsonl":
            entries.extend(catalog.load(p))
            continue
        arr = load_any(p)
        entries.append(catalog.CatalogEntry(p.stem, "armap", codec.serialize(arr),
                                            {"source_figure": p.name, "transcriber": "", "date": ""},
                                            _arr=arr))
    if closure:
        entries = catalog.closure_remove_free_ovals(entries)
    return [(e.id, e.arrangement) for e in entries]


def _summary(arr: core.Arrangement) -> dict:
    fs = core.faces(arr)
    return {
        "curves": {k: {"degree": c.degree, "rank": c.rank, "type": c.type, "nodal": c.nodal}
                   for k, c in sorted(arr.curves.items())},
        "branches": dict(sorted(arr.branches.items())),
        "components": len(arr.components),
        "crossings": sum(1 for _ in arr.crossings()),
        "faces": [f.kind for f in fs],
        "euler": arr.euler(),
        "bezout": [{"curves": list(b.curves), "crossings": b.crossings, "bound": b.bound}
                   for b in curves.bezout_audit(arr)],
    }


def cmd_parse(args):
    arr = load_any(args.file)
    if args.armap:
        return codec.serialize(arr)
    info = _summary(arr)
    if args.json:
        return json.dumps(info, indent=2, sort_keys=True) + "\n"
    lines = [f"components {info['components']}", f"crossings {info['crossings']}",
             f"faces {len(info['faces'])} ({', '.join(info['faces'])})", f"euler {info['euler']}"]
    for b in info["bezout"]:
        lines.append(f"bezout {b['curves'][0]}x{b['curves'][1]} {b['crossings']}/{b['bound']}")
    return "\n".join(lines) + "\n"


def cmd_canon(args):
    cert = canon.canonical_form(load_any(args.file), chiral=args.chiral).hex()
    if args.json:
        return json.dumps({"file": args.file, "certificate": cert}) + "\n"
    return cert + "\n"


def cmd_gen(args):
    bases = _named_bases(args.bases, args.closure)
    results = perturb.enumerate_snakes(bases, threads=args.threads)
    files = {}
    rows = []
    for i, r in enumerate(results):
        arr = r.arrangement
        w = curves.detect_snake(arr, perturb.SNAKE_BRANCH, codec.OTHER)
        rows.append({"index": i, "coiled": r.coiled,
                     "code": codec.snake_code(arr, w) if w else None,
                     "provenance": [list(p) for p in r.provenance]})
        if args.emit:
            files[f"snake{i:04d}.armap"] = codec.serialize(arr)
    hist = perturb.histogram(results)
    if args.emit:
        out = Path(args.emit)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text, encoding="utf-8")
    if args.json:
        return json.dumps({"count": len(results), "histogram": {str(k): v for k, v in hist.items()},
                           "results": rows}, indent=2) + "\n"
    if args.by_coiled:
        return "".join(f"coiled={k} count={v}\n" for k, v in hist.items())
    lines = [f"{len(results)} isotopy types"]
    for row in rows:
        prov = " ".join(f"{n}:{g}" for n, g in row["provenance"])
        lines.append(f"{row['index']} coiled={row['coiled']} code={row['code']} from {prov}")
    return "\n".join(lines) + "\n"


def cmd_count(args):
    arrs = [load_any(p) for p in args.files]
    kept, merge = canon.dedupe(arrs, chiral=args.chiral)
    if args.json:
        return json.dumps({"inputs": len(arrs), "distinct": len(kept), "classes": merge}) + "\n"
    return f"{len(kept)}\n"


def cmd_check(args):
    arr = load_any(args.file)
    report = {}
    ok = True
    over = [b for b in curves.bezout_audit(arr) if not b.ok]
    report["bezout_ok"] = not over
    ok &= not over
    snakes = []
    for cl in sorted(arr.curves):
        for other in sorted(arr.curves):
            if cl != other:
                snakes += curves.find_snakes(arr, cl, other)
    report["snakes"] = []
    for w in snakes:
        bad = restrict.check_snake_obstructions(arr, w)
        ok &= not bad
        report["snakes"].append({"oval": w.oval, "k": w.k, "coiled": list(w.coiled),
                                 "code": codec.snake_code(arr, w),
                                 "free_ovals_together": curves.free_ovals_together(arr, w),
                                 "obstructions": bad})
    if args.ref or args.mode == "absolute":
        ref = load_any(args.ref) if args.ref else None
        cr = restrict.congruence_check(arr, ref, q=args.q, mode=args.mode)
        report["congruence"] = {"chi_plus": cr.chi_plus, "rank": cr.rank, "type": cr.type,
                                "condition_I": cr.condition_I, "condition_II": cr.condition_II,
                                "mode": cr.mode, "target": cr.target, "mod8_m": cr.mod8_m,
                                "mod8_m1": cr.mod8_m1, "mod8_m2": cr.mod8_m2, "notes": cr.notes,
                                "passed": cr.passed}
        ok &= cr.passed
    report["passed"] = bool(ok)
    if args.json or args.report == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        lines = [f"bezout {'ok' if report['bezout_ok'] else 'EXCEEDED'}"]
        for s in report["snakes"]:
            lines.append(f"snake {s['oval']} k={s['k']} code={s['code']} "
                         f"free_ovals_together={s['free_ovals_together']} "
                         f"obstructions={','.join(s['obstructions']) or 'none'}")
        if "congruence" in report:
            c = report["congruence"]
            lines.append(f"chi+ {c['chi_plus']} target {c['target']} mod8_m={c['mod8_m']} "
                         f"mod8_m1={c['mod8_m1']} mod8_m2={c['mod8_m2']}")
        lines.append("pass" if ok else "FAIL")
        text = "\n".join(lines) + "\n"
    if not ok:
        raise Failure(text)
    return text


def cmd_catalog(args):
    path = Path(args.path) if args.path else catalog.data_dir() / "catalog.jsonl"
    if args.action == "validate":
        entries = catalog.load(path)
        return f"{len(entries)} entries ok\n"
    if args.action == "list":
        entries = catalog.load(path)
        if args.json:
            return json.dumps([e.to_json() for e in entries], indent=2) + "\n"
        return "".join(f"{e.id}\t{e.provenance.get('source_figure')}\t{e.tags}\n" for e in entries)
    if args.action == "add":
        entries = catalog.load(path) if path.exists() else []
        for b in args.bases:
            entries.append(catalog.entry_from_base(b, args.figure, args.transcriber, args.date))
        catalog.store(entries, path)
        return f"{len(entries)} entries in {path}\n"
    if args.action == "closure":
        entries = catalog.closure_remove_free_ovals(catalog.load(path))
        if args.out:
            catalog.store(entries, args.out)
        return f"{len(entries)} entries after closure\n"
    raise AssertionError(args.action)


def cmd_render(args):
    svg = render.render_svg(load_any(args.file), size=args.size)
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8")
        return ""
    return svg


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="snakecoil", description="Arrangements of real plane curves with snakes.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", help="validate a .base or .armap file")
    s.add_argument("file")
    s.add_argument("--armap", action="store_true", help="print the low-level map")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("canon", help="print the canonical certificate as hex")
    s.add_argument("file")
    s.add_argument("--chiral", action="store_true")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_canon)

    s = sub.add_parser("gen", help="generate snake arrangements from base arrangements")
    s.add_argument("--bases", nargs="+", required=True)
    s.add_argument("--closure", action="store_true", help="also use bases with free ovals removed")
    s.add_argument("--by-coiled", action="store_true", help="print a histogram by coiled branches")
    s.add_argument("--emit", metavar="DIR")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("count", help="count isotopy types among files")
    s.add_argument("files", nargs="+")
    s.add_argument("--chiral", action="store_true")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("check", help="obstructions and congruences")
    s.add_argument("file")
    s.add_argument("--ref")
    s.add_argument("--mode", choices=("relative", "absolute"), default="relative")
    s.add_argument("--q", type=int)
    s.add_argument("--report", choices=("json", "text"), default="text")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("catalog", help="JSON-lines catalogue")
    s.add_argument("action", choices=("list", "validate", "add", "closure"))
    s.add_argument("--path")
    s.add_argument("--bases", nargs="*", default=[])
    s.add_argument("--figure", default="")
    s.add_argument("--transcriber", default="")
    s.add_argument("--date", default="")
    s.add_argument("--out")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("render", help="SVG picture")
    s.add_argument("file")
    s.add_argument("-o", "--out")
    s.add_argument("--size", type=int, default=400)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "check" and args.mode == "absolute" and args.q is None:
        parser.error("--mode absolute needs --q")
    try:
        out = args.func(args)
    except Failure as e:
        sys.stdout.write(str(e))
        return 1
    except (ArrangementError, OSError) as e:
        if getattr(args, "json", False):
            sys.stdout.write(json.dumps({"error": str(e), "kind": type(e).__name__}) + "\n")
        print(f"error: {e}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
