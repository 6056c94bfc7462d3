"""Command line entry point.

Exit codes: 0 success, 2 invalid input, 3 a checked bound failed (fuzz dumps
the offending maps), 4 a result could not be settled at the requested depth.
Reports go to stdout and, as JSON files, to the output directory (``--out``,
else ``$PCONTRACT_OUT``, else ``./pcontract-out``).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .billiard import extract_return_map, sample_agreement
from .chains import verify_lemma
from .conjugacy import ConjugacyTable, verify_half_slopes
from .core import validate
from .errors import (
    BudgetExceeded,
    CornerHit,
    IncommensurableEdges,
    InvalidMap,
    NonInjective,
    NotInward,
    ResolutionExceeded,
    SpecError,
    UnknownKind,
)
from .files import dumps, map_to_spec, parse_map, parse_scene, write_json
from .fixtures import FIXTURES
from .fuzz import fuzz_generate
from .intervals import fmt, rational
from .pipeline import analyze
from .plot import KINDS, plot

OK, INVALID, VIOLATION, INCONCLUSIVE = 0, 2, 3, 4
OUT_ENV = "PCONTRACT_OUT"


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _err(msg: str):
    print(msg, file=sys.stderr)


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or "pcontract-out")


def _load_map(args, check=True):
    if not args.spec:
        raise _Fail(INVALID, "--spec is required")
    path = Path(args.spec)
    try:
        if not path.exists() and args.spec in FIXTURES:
            f = FIXTURES[args.spec]()
        else:
            f = parse_map(path, check=check)
    except FileNotFoundError:
        raise _Fail(INVALID, f"no such spec file: {args.spec}") from None
    except (SpecError, InvalidMap) as exc:
        raise _Fail(INVALID, f"{args.spec}: {exc}") from None
    return f


def _stem(args, f) -> str:
    return f.name or Path(args.spec).stem


def _emit(args, name: str, report: dict):
    text = dumps(report)
    sys.stdout.write(text)
    write_json(_out_dir(args) / name, report)


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    f = _load_map(args, check=False)
    rep = validate(f)
    report = {
        "map": f.name,
        "ok": rep.ok,
        "kappa": fmt(rep.kappa) if rep.ok else None,
        "violations": [{"kind": v.kind, "detail": v.message} for v in rep.violations],
    }
    sys.stdout.write(dumps(report))
    for v in rep.violations:
        _err(f"{v.kind}: {v.message}")
    return OK if rep.ok else INVALID


def _analysis(args, f, evidence=True):
    return analyze(f, K=args.max_period, L=args.depth, evidence=evidence)


def _verdict_code(a) -> int:
    if a.violations:
        for v in a.violations:
            _err(f"violation: {v}")
        return VIOLATION
    if a.inconclusive:
        _err("inconclusive: some gap is not captured within the depth bound")
        return INCONCLUSIVE
    return OK


def cmd_census(args) -> int:
    f = _load_map(args)
    a = _analysis(args, f)
    report = {
        "map": f.name,
        "n": f.n,
        "verdict": a.verdict.to_json(),
        "orbits": [r.to_json() for r in a.verdict.orbits],
        "residual": a.decomposition.residual_status,
        "residual_verdict": a.residual_verdict,
        "violations": a.violations,
    }
    _emit(args, f"{_stem(args, f)}-census.json", report)
    return _verdict_code(a)


def cmd_gaps(args) -> int:
    f = _load_map(args)
    a = _analysis(args, f, evidence=False)
    report = {
        "map": f.name,
        "atlas": a.atlas.to_json(),
        "checks": dict(vars(a.atlas_checks)),
        "captures": [c.to_json() for c in a.captures],
    }
    _emit(args, f"{_stem(args, f)}-gaps.json", report)
    failures = a.atlas_checks.failures()
    if failures:
        _err("gap structure checks failed: " + ", ".join(failures))
        return VIOLATION
    return OK


def cmd_manifolds(args) -> int:
    f = _load_map(args)
    a = _analysis(args, f, evidence=False)
    report = {
        "map": f.name,
        "orbits": [r.to_json() for r in a.verdict.orbits],
        "manifolds": [m.to_json() for m in a.manifolds],
        "decomposition": a.decomposition.to_json(),
        "violations": a.violations,
    }
    _emit(args, f"{_stem(args, f)}-manifolds.json", report)
    return _verdict_code(a)


def cmd_normalize(args) -> int:
    f = _load_map(args)
    depth = args.depth if args.depth_given else 40
    tol = rational(args.tol) if args.tol else rational("1/100000")
    try:
        table = ConjugacyTable(f, depth)
        rep = verify_half_slopes(f, table, samples_per_piece=args.samples, tol=tol)
    except ResolutionExceeded as exc:
        _err(f"inconclusive: {exc}")
        return INCONCLUSIVE
    report = {
        "map": f.name,
        "slopes": rep.to_json(),
        "breakpoint_images": [{"lo": fmt(e.lo), "hi": fmt(e.hi)} for e in table.breakpoint_images()],
        "tail": fmt(table.tail),
    }
    _emit(args, f"{_stem(args, f)}-normalize.json", report)
    if not rep.ok:
        _err("some difference quotient is further than tol from +-1/2")
        return VIOLATION
    return OK


def cmd_chains(args) -> int:
    try:
        rep = verify_lemma(args.s_max, args.alphabet)
    except BudgetExceeded as exc:
        _err(str(exc))
        return INCONCLUSIVE
    _emit(args, f"chains-s{args.s_max}-a{args.alphabet}.json", rep.to_json())
    return OK if rep.ok else VIOLATION


def cmd_billiard(args) -> int:
    src = args.scene or args.spec
    if not src:
        raise _Fail(INVALID, "--scene is required")
    try:
        scene = parse_scene(Path(src))
        ext = extract_return_map(scene)
    except FileNotFoundError:
        raise _Fail(INVALID, f"no such scene file: {src}") from None
    except (SpecError, NotInward, IncommensurableEdges, NonInjective, CornerHit, ValueError) as exc:
        raise _Fail(INVALID, f"{src}: {exc}") from None
    matches, samples = sample_agreement(scene, ext, args.samples)
    report = {"extract": ext.to_json(), "samples": samples, "sample_matches": matches}
    code = OK
    if ext.map is not None:
        a = analyze(ext.map, K=args.max_period, L=args.depth, evidence=False)
        report["map_spec"] = map_to_spec(ext.map)
        report["census"] = {"verdict": a.verdict.to_json(), "orbits": [r.to_json() for r in a.verdict.orbits], "violations": a.violations}
        code = _verdict_code(a)
    else:
        _err("return map not emitted: " + "; ".join(ext.reasons))
    if matches != samples:
        _err(f"first_return disagrees with the extracted formula at {samples - matches} of {samples} samples")
        code = VIOLATION
    _emit(args, f"{scene.name or Path(src).stem}-billiard.json", report)
    return code


def _fuzz_one(job):
    n, seed, max_period, depth, plant = job
    f = fuzz_generate(n, seed, plant=plant)
    a = analyze(f, K=max_period, L=depth, evidence=False)
    return {
        "seed": seed,
        "spec": map_to_spec(f),
        "m": a.verdict.m,
        "d": a.verdict.d,
        "residual": a.residual_verdict,
        "violations": a.violations,
    }


def cmd_fuzz(args) -> int:
    base = args.seed if args.seed is not None else 0
    jobs = [(args.n, base * 1_000_000 + i, args.max_period, args.depth, args.plant) for i in range(args.count)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_fuzz_one, jobs, chunksize=8))
    else:
        results = [_fuzz_one(j) for j in jobs]
    bad = [r for r in results if r["violations"]]
    out = _out_dir(args)
    for r in bad:
        spec = dict(r["spec"])
        spec["notes"] = "counterexample: " + "; ".join(r["violations"])
        path = write_json(out / "counterexamples" / f"{spec['name']}.json", spec)
        _err(f"violation in {path}: {spec['notes']}")
    hist = {}
    for r in results:
        key = f"m={r['m']},d={r['d']}"
        hist[key] = hist.get(key, 0) + 1
    summary = {
        "n": args.n,
        "count": args.count,
        "seed": base,
        "max_period": args.max_period,
        "violations": len(bad),
        "inconclusive": sum(r["residual"] == "inconclusive" for r in results),
        "tight": sum(r["m"] + r["d"] == args.n for r in results),
        "orbit_counts": dict(sorted(hist.items())),
    }
    write_json(out / f"fuzz-n{args.n}-seed{base}.json", summary)
    print(f"maps: {args.count}")
    print(f"violations: {len(bad)}")
    print(f"inconclusive: {summary['inconclusive']}")
    print(f"tight: {summary['tight']}")
    return VIOLATION if bad else OK


def cmd_plot(args) -> int:
    f = _load_map(args)
    try:
        svg = plot(args.kind, f, x0=rational(args.x0) if args.x0 else None, steps=args.steps, depth=min(args.depth, 40))
    except UnknownKind as exc:
        raise _Fail(INVALID, str(exc)) from None
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{_stem(args, f)}-{args.kind}.svg"
    path.write_text(svg)
    print(path)
    return OK


# ---------------------------------------------------------------------------


class _DepthAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        namespace.depth_given = True


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="map spec JSON file, or a fixture name such as map-g")
    common.add_argument("--max-period", type=int, default=24, metavar="K", help="longest period searched (default 24)")
    common.add_argument("--depth", type=int, default=60, metavar="L", action=_DepthAction, help="gap layer depth (default 60; 40 for normalize)")
    common.add_argument("--seed", type=int, help="base seed for fuzz")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./pcontract-out)")
    common.add_argument("--tol", help="tolerance as p/q (normalize, default 1/100000)")

    p = argparse.ArgumentParser(prog="pcontract", description="Exact analysis of piecewise contractions of [0, 1).")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a map spec")
    sub.add_parser("census", parents=[common], help="periodic orbits, trapping regions and the orbit count bounds")
    sub.add_parser("gaps", parents=[common], help="gap sets, layers and capture times")
    sub.add_parser("manifolds", parents=[common], help="basin interiors and the breakpoint assignment")
    s = sub.add_parser("normalize", parents=[common], help="check the slope +-1/2 normal form")
    s.add_argument("--samples", type=int, default=100, help="sample pairs per piece")
    s = sub.add_parser("chains", parents=[common], help="exhaustive check of the chain coordinate bound")
    s.add_argument("--s-max", type=int, default=5)
    s.add_argument("--alphabet", type=int, default=7)
    s = sub.add_parser("billiard", parents=[common], help="return map of a polygon scene")
    s.add_argument("--scene", help="scene JSON file")
    s.add_argument("--samples", type=int, default=256, help="first_return samples per piece")
    s = sub.add_parser("fuzz", parents=[common], help="random maps against the orbit count bounds")
    s.add_argument("--n", type=int, default=3, help="pieces per map")
    s.add_argument("--count", type=int, default=500)
    s.add_argument("--plant", action="store_true", help="force a fixed breakpoint into every map")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s = sub.add_parser("plot", parents=[common], help="SVG figure")
    s.add_argument("--kind", default="graph", help=f"one of {', '.join(KINDS)}")
    s.add_argument("--x0", help="cobweb start point as p/q")
    s.add_argument("--steps", type=int, default=40)
    return p


COMMANDS = {
    "validate": cmd_validate,
    "census": cmd_census,
    "gaps": cmd_gaps,
    "manifolds": cmd_manifolds,
    "normalize": cmd_normalize,
    "chains": cmd_chains,
    "billiard": cmd_billiard,
    "fuzz": cmd_fuzz,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "depth_given"):
        args.depth_given = False
    try:
        return COMMANDS[args.command](args)
    except _Fail as exc:
        _err(str(exc))
        return exc.code
    except (ValueError, TypeError) as exc:
        _err(f"error: {exc}")
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
