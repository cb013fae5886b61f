"""Command line interface.

Subcommands: ``check``, ``cocycle``, ``verify-coboundary``, ``normalize``,
``criteria`` and ``gallery``.  Exit status is 0 when every requested
verdict passes, 1 when a check fails and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import curves, gallery, obstructions
from .errors import FormalNeighbourhoodError, InputError, NotNormalizableError, OrderError
from .exprparse import dump_atlas, load_atlas

__all__ = ["run", "main", "build_parser"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["text", "structured"], default="text")
    common.add_argument("--out", help="write the main output document to this path")

    p = _Parser(prog="formalnbhd", description="Formal neighbourhood atlas toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("check", parents=[common], help="run an embedding check")
    c.add_argument("--atlas", required=True)
    c.add_argument("--condition", required=True, choices=["split", "ksplit", "comfortable", "linearizable"])
    c.add_argument("--k", type=int, default=1)

    c = sub.add_parser("cocycle", parents=[common], help="compute an obstruction cocycle")
    c.add_argument("--atlas", required=True)
    c.add_argument("--kind", required=True, choices=["s", "g", "h", "conn"])
    c.add_argument("--k", type=int, default=1)
    c.add_argument("--frame", choices=["alpha", "beta"], default="beta", help="monomial frame for g")

    c = sub.add_parser("verify-coboundary", parents=[common], help="check a primitive of a cocycle")
    c.add_argument("--atlas", required=True)
    c.add_argument("--cochain", required=True)
    c.add_argument("--kind", choices=["g", "h"], help="defaults from the cochain role")
    c.add_argument("--k", type=int, help="defaults from the cochain order")

    c = sub.add_parser("normalize", parents=[common], help="apply the normalising coordinate change")
    c.add_argument("--atlas", required=True)
    c.add_argument("--cochain", required=True)

    c = sub.add_parser("criteria", parents=[common], help="genus/self-intersection guarantees")
    c.add_argument("--atlas", help="read genus and self-intersection from atlas metadata")
    c.add_argument("--genus", type=int)
    c.add_argument("--self-intersection", type=int, dest="self_intersection")
    c.add_argument("--max-k", type=int, default=6, dest="max_k")
    c.add_argument("--split-order", type=int, dest="split_order")
    c.add_argument("--comfortable-order", type=int, dest="comfortable_order")

    c = sub.add_parser("gallery", parents=[common], help="list or emit built-in atlases")
    c.add_argument("action", choices=["list", "emit"])
    c.add_argument("name", nargs="?")
    c.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    return p


def _params(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def _check(args) -> tuple[dict, int, list[str]]:
    a = load_atlas(args.atlas)
    rep = obstructions.check_condition(a, args.condition, args.k)
    text = [f"atlas {a.name}: {args.condition} (k={rep.order}): {'pass' if rep.passed else 'fail'}"]
    for w in rep.witnesses:
        text.append(
            f"  witness on {w.overlap[0]}->{w.overlap[1]}: {w.derivative} has normal order "
            f"{w.normal_order}, needs {w.required}; leading term {w.leading}"
        )
    return {"verdicts": [rep.to_dict()], "atlas": a.name}, (0 if rep.passed else 1), text


def _cocycle(args) -> tuple[dict, int, list[str]]:
    a = load_atlas(args.atlas)
    if args.kind == "s":
        c = obstructions.cocycle_s(a)
    elif args.kind == "g":
        c = obstructions.cocycle_g(a, args.k, frame=args.frame)
    elif args.kind == "h":
        c = obstructions.cocycle_h(a, args.k)
    else:
        c = obstructions.cocycle_connection(a)
    doc = c.to_dict(a)
    text = [f"atlas {a.name}: {args.kind}-cocycle (order {c.order}, {c.frame} frame): {'zero' if c.is_zero() else 'nonzero'}"]
    for ov in doc["overlaps"]:
        for row in ov["coefficients"]:
            text.append(f"  {ov['from']}->{ov['to']} target {row['target']} monomial {row['monomial']}: {row['value']}")
    return {"cocycle": doc, "atlas": a.name}, 0, text


def _cocycle_for(a, p, kind, k):
    kind = kind or ("g" if p.role == obstructions.CochainRole.SPLIT else "h")
    if kind == "g":
        return obstructions.cocycle_g(a, k or p.order)
    return obstructions.cocycle_h(a, k or p.order - 1)


def _verify(args) -> tuple[dict, int, list[str]]:
    a = load_atlas(args.atlas)
    p = obstructions.load_cochain(args.cochain, a)
    c = _cocycle_for(a, p, args.kind, args.k)
    rep = obstructions.verify_coboundary(c, p, a)
    d = rep.to_dict(a)
    d["kind"] = c.kind.value
    d["k"] = c.order
    text = [f"atlas {a.name}: cochain bounds the {c.kind.value}-cocycle of order {c.order}: {'pass' if rep.passed else 'fail'}"]
    if not rep.passed:
        w = d["witness"]
        text.append(
            f"  first mismatch on {w['overlap']['from']}->{w['overlap']['to']}, target {w['target']}, "
            f"multi-index {w['multi_index']}: cocycle {w['cocycle_value']} vs coboundary {w['coboundary_value']}"
        )
    return {"verdicts": [d], "atlas": a.name}, (0 if rep.passed else 1), text


def _normalize(args) -> tuple[dict, int, list[str]]:
    a = load_atlas(args.atlas)
    p = obstructions.load_cochain(args.cochain, a)
    if p.role == obstructions.CochainRole.SPLIT:
        b = obstructions.normalize_splitting(a, p)
        rep = obstructions.check_k_splitting_atlas(b, p.order)
    else:
        b = obstructions.normalize_comfortable(a, p)
        rep = obstructions.check_k_comfortable_atlas(b, p.order - 1)
    atlas_text = dump_atlas(b)
    result = {"verdicts": [rep.to_dict()], "atlas": a.name}
    if args.out:
        _write(args.out, atlas_text)
        result["written"] = args.out
    else:
        result["normalized_atlas"] = json.loads(atlas_text)
    text = [f"atlas {a.name}: normalized; {rep.condition} (k={rep.order}) on result: {'pass' if rep.passed else 'fail'}"]
    if args.out:
        text.append(f"  normalized atlas written to {args.out}")
    return result, (0 if rep.passed else 1), text


def _criteria(args) -> tuple[dict, int, list[str]]:
    g, d = args.genus, args.self_intersection
    if args.atlas:
        a = load_atlas(args.atlas)
        g = a.genus if g is None else g
        d = a.self_intersection if d is None else d
    if g is None or d is None:
        raise UsageError("criteria needs --genus and --self-intersection (or an atlas with metadata)")
    rep = curves.curve_report(curves.CurveData(g, d, args.max_k), args.split_order, args.comfortable_order)
    return {"criteria": rep.to_dict()}, 0, rep.to_text().splitlines()


def _gallery(args) -> tuple[dict, int, list[str]]:
    if args.action == "list":
        items = [
            {"name": it.name, "description": it.description, "defaults": dict(it.defaults), "expected": dict(it.expected)}
            for it in gallery.list_items()
        ]
        text = [f"{it['name']}: {it['description']}" for it in items]
        return {"items": items}, 0, text
    if not args.name:
        raise UsageError("gallery emit needs an item name")
    atlas_text = gallery.emit(args.name, **_params(args.param))
    if args.out:
        _write(args.out, atlas_text)
        return {"written": args.out, "item": args.name}, 0, [f"wrote {args.name} to {args.out}"]
    return {"atlas": json.loads(atlas_text)}, 0, atlas_text.rstrip("\n").splitlines()


_HANDLERS = {
    "check": _check,
    "cocycle": _cocycle,
    "verify-coboundary": _verify,
    "normalize": _normalize,
    "criteria": _criteria,
    "gallery": _gallery,
}


def run(argv: Sequence[str]) -> tuple[dict, int, str]:
    """Execute a command; return ``(report, exit_status, rendered_output)``."""
    argv = list(argv)
    report: dict = {"command": argv}
    fmt = "structured" if "structured" in argv and "--format" in argv else "text"
    text: list[str] = []
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        body, status, text = _HANDLERS[args.command](args)
        report.update(body)
    except UsageError as exc:
        status = 2
        report["error"] = {"error": "UsageError", "message": str(exc)}
        text = [f"usage error: {exc}"]
    except (OrderError, NotNormalizableError) as exc:
        status = 1
        report["error"] = exc.to_dict()
        text = [f"failed: {exc.message}"]
    except FormalNeighbourhoodError as exc:
        status = 2
        report["error"] = exc.to_dict()
        text = [f"error: {exc.message}"]
    report["status"] = status
    if fmt == "structured":
        rendered = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    else:
        rendered = "\n".join(text) + "\n"
    if status != 2 and report.get("command") and _out_is_report(argv):
        _write(_out_path(argv), rendered)
    return report, status, rendered


def _out_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--out" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--out="):
            return tok.split("=", 1)[1]
    return None


def _out_is_report(argv) -> bool:
    """``--out`` receives the report except for commands that emit an atlas."""
    if _out_path(argv) is None:
        return False
    return not any(cmd in argv for cmd in ("normalize", "gallery"))


def main(argv: Optional[Sequence[str]] = None) -> int:
    report, status, rendered = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stderr if status == 2 else sys.stdout
    if _out_is_report(list(sys.argv[1:] if argv is None else argv)) and status != 2:
        return status
    stream.write(rendered)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
