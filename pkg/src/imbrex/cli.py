"""Command line: construct, check, residue, spread, report-diff.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage or structural error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import shutil
import sys
import time
from pathlib import Path

from . import catalog
from .analysis import (
    block_geometry,
    blocks,
    check_cc1,
    double_perp_geometry,
    induced_spread,
    verify_nonclosing_theorem,
)
from .axioms import (
    AxiomReport,
    PreconditionError,
    check_imb_star,
    check_polar_space,
    check_strong_parapolar_diam2,
    is_imbrex,
    symps_of,
)
from .geometry import EXHAUSTIVE_LIMIT, IncidenceGeometry
from .io import FormatError, dumps, load, save, sha256_file
from .mm import EmbeddedMMSet, abstract_geometry, check_lmm3, check_mm_axioms, discover_xi, residue

SUITES = ("polar", "parapolar", "imbrex", "imbstar", "onan", "cc1", "mm", "lmm3", "all")
PARAMS = ("m", "n", "p", "r", "q", "q2")
DEFAULT_SAMPLE = 100_000
TIMING_KEYS = {"ms", "wall_ms"}


class UsageError(Exception):
    pass


def _cache_dir() -> Path:
    return Path(os.environ.get("IMBREX_CACHE_DIR", Path.home() / ".cache" / "imbrex"))


def _embedded_builder(name: str):
    if name == "segre":
        return lambda p, r, q: catalog.segre_embedding(p, r, q)
    if name == "grassmann":
        return lambda n, q: catalog.plucker_embedding(n, q)
    if name == "halfspin_d5":
        def spinor(q):
            e = catalog.spinor_embedding(q)
            e.xi = discover_xi(e)
            return e
        return spinor
    raise UsageError(f"no embedded version of {name}; embedded entries: segre, grassmann, halfspin_d5")


def cmd_construct(args) -> int:
    entry = catalog.CATALOG.get(args.name)
    if entry is None:
        raise UsageError(f"unknown catalog entry {args.name!r}; supported: {', '.join(catalog.supported())}")
    params = {p: getattr(args, p) for p in entry.params if getattr(args, p) is not None}
    missing = [p for p in entry.params if p not in params]
    if missing:
        raise UsageError(f"{args.name} needs --{' --'.join(missing)}")
    key = hashlib.sha256(json.dumps([args.name, params, args.embedded], sort_keys=True).encode()).hexdigest()[:24]
    cached = _cache_dir() / f"{key}.json"
    if not args.no_cache and cached.exists():
        shutil.copyfile(cached, args.out)
        obj = load(args.out)
    else:
        try:
            if args.embedded:
                obj = _embedded_builder(args.name)(*[params[p] for p in entry.params])
            else:
                obj = catalog.build(args.name, **params)
        except ValueError as e:
            raise UsageError(str(e)) from None
        save(obj, args.out)
        if not args.no_cache:
            cached.parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(args.out, cached)
    g = obj.geometry if isinstance(obj, EmbeddedMMSet) else obj
    stats = {"name": g.name or args.name, "points": g.point_count, "lines": len(g.lines)}
    if isinstance(obj, EmbeddedMMSet):
        stats.update(ambient_dim=obj.ambient_dim, xi=len(obj.xi), d=obj.d, r=obj.r)
    print(dumps(stats), end="")
    return 0


def _sampling(args, n: int) -> tuple[int | None, int]:
    if args.full:
        return None, args.seed
    if args.sample is not None:
        return args.sample, args.seed
    return (None if n <= EXHAUSTIVE_LIMIT else DEFAULT_SAMPLE), args.seed


def _run_suite(suite: str, obj, sample: int | None, seed: int, lenient: bool) -> list[AxiomReport]:
    embedded = isinstance(obj, EmbeddedMMSet)
    g: IncidenceGeometry = abstract_geometry(obj) if embedded else obj
    exhaustive = None if sample is None else False
    if suite == "polar":
        return [check_polar_space(g)]
    if suite == "parapolar":
        return [check_strong_parapolar_diam2(g, exhaustive)]
    if suite == "imbrex":
        rep, _ = is_imbrex(g, sample=sample, seed=seed, exhaustive=exhaustive)
        return [rep]
    if suite == "imbstar":
        return [check_imb_star(g, sample=sample, seed=seed, exhaustive=exhaustive)]
    if suite == "onan":
        out = []
        if not lenient:
            _, rep = block_geometry(g)
            out.append(rep)
        out.append(verify_nonclosing_theorem(g, check=lenient))
        return out
    if suite == "cc1":
        return [check_cc1(g, check=True, sample=sample, seed=seed)]
    if suite in ("mm", "lmm3"):
        if not embedded:
            raise UsageError(f"suite {suite} needs an embedded input")
        if suite == "mm":
            return [check_mm_axioms(obj)]
        return [check_lmm3(obj, sample=sample, seed=seed)]
    raise UsageError(f"unknown suite {suite}")


def _run_all(obj, sample, seed) -> list[AxiomReport]:
    reports = []
    embedded = isinstance(obj, EmbeddedMMSet)
    for suite in ("polar", "parapolar", "imbrex", "imbstar", "onan", "cc1") + (("mm", "lmm3") if embedded else ()):
        try:
            reports.extend(_run_suite(suite, obj, sample, seed, lenient=True))
        except PreconditionError as e:
            reports.append(AxiomReport(suite, "skipped", {"reason": str(e)}, 0))
    return reports


def cmd_check(args) -> int:
    t0 = time.perf_counter()
    obj = load(args.input)
    n = len(obj) if isinstance(obj, EmbeddedMMSet) else obj.point_count
    if args.suite in ("mm", "lmm3") and not isinstance(obj, EmbeddedMMSet):
        raise UsageError(f"suite {args.suite} needs an embedded input")
    sample, seed = _sampling(args, n)
    try:
        if args.suite == "all":
            reports = _run_all(obj, sample, seed)
        else:
            reports = _run_suite(args.suite, obj, sample, seed, lenient=False)
    except PreconditionError as e:
        raise UsageError(str(e)) from None
    failed = any(r.verdict == "fail" for r in reports)
    manifest = {
        "command": ["check", Path(args.input).name, "--suite", args.suite],
        "inputs": {Path(args.input).name: sha256_file(args.input)},
        "sample": sample,
        "seed": seed,
        "reports": [r.to_dict() for r in reports],
        "verdict": "fail" if failed else "pass",
        "wall_ms": int(round((time.perf_counter() - t0) * 1000)),
    }
    text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 1 if failed else 0


def cmd_residue(args) -> int:
    obj = load(args.input)
    if not isinstance(obj, EmbeddedMMSet):
        raise UsageError("residue needs an embedded input")
    if not 0 <= args.point < len(obj):
        raise UsageError(f"point {args.point} out of range")
    try:
        res = residue(obj, args.point)
    except ValueError as e:
        raise UsageError(str(e)) from None
    save(res, args.out)
    print(dumps({"points": len(res), "lines": len(res.geometry.lines), "ambient_dim": res.ambient_dim,
                 "xi": len(res.xi), "d": res.d, "r": res.r}), end="")
    return 0


def cmd_spread(args) -> int:
    obj = load(args.input)
    g = abstract_geometry(obj) if isinstance(obj, EmbeddedMMSet) else obj
    try:
        bg, _ = block_geometry(g, check=False)
    except PreconditionError as e:
        raise UsageError(str(e)) from None
    if not 0 <= args.block < len(bg.blocks) or not 0 <= args.symp < len(bg.symps):
        raise UsageError(f"block must be < {len(bg.blocks)} and symp < {len(bg.symps)}")
    try:
        sp = induced_spread(g, bg, args.block, args.symp)
    except ValueError as e:
        raise UsageError(str(e)) from None
    out = sp.to_dict()
    code = 0
    if not sp.ok:
        out["witness"] = sp.witness
        code = 1
    else:
        dp = double_perp_geometry(g, bg, sp)
        out["sigma"] = {"lines": [list(l) for l in dp.sigma.lines], "report": dp.report.to_dict()}
        code = 0 if dp.report.passed else 1
    text = dumps(out)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


def _diff(a, b, path="$") -> list[str]:
    if type(a) is not type(b):
        return [path]
    if isinstance(a, dict):
        out = []
        for k in sorted(set(a) | set(b)):
            if k not in a or k not in b:
                out.append(f"{path}.{k}")
            else:
                out.extend(_diff(a[k], b[k], f"{path}.{k}"))
        return out
    if isinstance(a, list):
        if len(a) != len(b):
            return [path]
        return [d for i, (x, y) in enumerate(zip(a, b)) for d in _diff(x, y, f"{path}[{i}]")]
    return [] if a == b else [path]


def cmd_report_diff(args) -> int:
    try:
        a = json.loads(Path(args.a).read_text())
        b = json.loads(Path(args.b).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(str(e)) from None
    diffs = _diff(_strip_timing(a), _strip_timing(b))
    for d in diffs:
        print(d)
    return 1 if diffs else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="imbrex", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a catalog geometry and write it as JSON")
    c.add_argument("name")
    for p in PARAMS:
        c.add_argument(f"--{p}", type=int)
    c.add_argument("-o", "--out", required=True)
    c.add_argument("--embedded", action="store_true", help="write coordinates and the subspace family")
    c.add_argument("--no-cache", action="store_true")
    c.set_defaults(func=cmd_construct)

    k = sub.add_parser("check", help="run an axiom suite and emit a run manifest")
    k.add_argument("input")
    k.add_argument("--suite", choices=SUITES, default="all")
    k.add_argument("--report")
    k.add_argument("--sample", type=int)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--full", action="store_true", help="exhaustive scans regardless of size")
    k.set_defaults(func=cmd_check)

    r = sub.add_parser("residue", help="residue of an embedded set at a point")
    r.add_argument("input")
    r.add_argument("--point", type=int, required=True)
    r.add_argument("-o", "--out", required=True)
    r.set_defaults(func=cmd_residue)

    s = sub.add_parser("spread", help="spread induced on a symp by a disjoint block")
    s.add_argument("input")
    s.add_argument("--block", type=int, required=True)
    s.add_argument("--symp", type=int, required=True)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_spread)

    d = sub.add_parser("report-diff", help="compare two run manifests, ignoring timings")
    d.add_argument("a")
    d.add_argument("b")
    d.set_defaults(func=cmd_report_diff)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args)
    except (UsageError, FormatError, FileNotFoundError) as e:
        print(f"imbrex: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
