"""Command-line interface.

Exit codes: 0 success, 1 diagnostics (bad input, failed verification,
oracle disagreement), 2 a resource budget was exceeded.  Every option has
an environment-variable default named ``SENSORSYNTH_<OPTION>`` (upper
case, dashes as underscores), e.g. ``SENSORSYNTH_MAX_COVER_LIST``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..belief import DEFAULT_MAX_DEPTH, DEFAULT_MAX_VERTICES, build_tree
from ..cover import Cover
from ..errors import ResourceError, SensorSynthError
from ..properties import ConstraintSpec
from ..synth import extract_plan, synthesize
from ..verify import OracleBounds, oracle, solves
from . import export, io
from .scenarios import SCENARIOS, builtin_scenario

ENV_PREFIX = "SENSORSYNTH_"
log = logging.getLogger("sensorsynth")


def _env(name, default=None, cast=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise SystemExit(f"error: {ENV_PREFIX}{name.upper().replace('-', '_')}={raw!r} is not a valid {cast.__name__}")


def _add_source(p):
    p.add_argument("problem", nargs="?", default=_env("problem"), help="problem file (JSON)")
    p.add_argument("--scenario", choices=SCENARIOS, default=_env("scenario"), help="use a built-in fixture")
    p.add_argument("--segments", type=int, default=_env("segments", None, int), help="track-cyclic segment count")


def _add_budgets(p):
    p.add_argument("--max-tree-vertices", type=int, default=_env("max-tree-vertices", None, int))
    p.add_argument("--max-tree-depth", type=int, default=_env("max-tree-depth", None, int))
    p.add_argument("--max-cover-list", type=int, default=_env("max-cover-list", None, int))
    p.add_argument("--max-intersect-results", type=int, default=_env("max-intersect-results", None, int))


def _add_filters(p):
    g = p.add_argument_group("global constraints applied when counting")
    g.add_argument("--partition", action="store_true", default=_env("partition", False, _flag))
    g.add_argument("--overlapping", type=int, default=_env("overlapping", None, int))
    g.add_argument("--outputting", type=int, default=_env("outputting", None, int))


def _flag(raw):
    if raw.lower() in ("1", "true", "yes", "on"):
        return True
    if raw.lower() in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sensorsynth", description="Joint plan and sensor synthesis.")
    parser.add_argument("-v", "--verbose", action="store_true", default=_env("verbose", False, _flag))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="problem -> upper covers, counts and witness plans")
    _add_source(p)
    _add_budgets(p)
    _add_filters(p)
    p.add_argument("--out", type=Path, default=_env("out", None, Path), help="directory for solutions and plans")
    p.add_argument("--plans", action="store_true", default=_env("plans", False, _flag), help="write one plan per root cover")
    p.add_argument("--verify", action="store_true", default=_env("verify", False, _flag), help="verify every written plan")
    p.add_argument("--no-compact", action="store_true", default=_env("no-compact", False, _flag))
    p.add_argument("--workers", type=int, default=_env("workers", 1, int), help="processes used for verification")

    p = sub.add_parser("verify", help="problem + plan + cover -> verdict")
    p.add_argument("problem")
    p.add_argument("plan")
    p.add_argument("cover")
    p.add_argument("--out", type=Path, default=_env("out", None, Path))

    p = sub.add_parser("oracle", help="brute-force covers of a small problem, diffed against synth")
    _add_source(p)
    _add_budgets(p)
    p.add_argument("--max-observations", type=int, default=_env("max-observations", 4, int))
    p.add_argument("--max-vertices", type=int, default=_env("max-vertices", 16, int))

    p = sub.add_parser("scenario", help="emit a built-in fixture as a problem file")
    p.add_argument("name", choices=SCENARIOS)
    p.add_argument("--segments", type=int, default=_env("segments", None, int))
    p.add_argument("--out", type=Path, default=_env("out", None, Path))

    p = sub.add_parser("tree", help="emit the belief tree")
    _add_source(p)
    _add_budgets(p)
    p.add_argument("--format", choices=("dot", "structured"), default=_env("format", "dot"))
    p.add_argument("--out", type=Path, default=_env("out", None, Path))
    return parser


def _load(args) -> io.ProblemFile:
    if args.scenario:
        opts = {"segments": args.segments} if args.segments else {}
        problem, spec = builtin_scenario(args.scenario, **opts)
        return io.ProblemFile(problem, spec)
    if not args.problem:
        raise SystemExit("error: give a problem file or --scenario")
    return io.parse_problem(Path(args.problem).read_bytes())


def _budget(args, pf, name, default=None):
    v = getattr(args, name, None)
    return v if v is not None else pf.budgets.get(name, default)


def _tree(args, pf):
    return build_tree(
        pf.problem,
        pf.spec,
        pf.stipulation,
        max_vertices=_budget(args, pf, "max_tree_vertices", DEFAULT_MAX_VERTICES),
        max_depth=_budget(args, pf, "max_tree_depth", DEFAULT_MAX_DEPTH),
    )


def _emit(text: str, out: Path | None, name: str):
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8")


def _check(job):
    problem, plan, cover = job
    return solves(plan, problem, cover).verdict


def cmd_synth(args):
    pf = _load(args)
    tree = _tree(args, pf)
    sol = synthesize(
        tree,
        pf.spec,
        compact=not args.no_compact,
        max_covers=_budget(args, pf, "max_cover_list"),
        max_intersect=_budget(args, pf, "max_intersect_results"),
    )
    spec = pf.spec
    filt = ConstraintSpec(
        partition=args.partition or spec.partition,
        contiguous=spec.contiguous,
        neighbor=spec.neighbor,
        outputting=args.outputting or spec.outputting,
        overlapping=args.overlapping or spec.overlapping,
        wide=spec.wide,
        max_width=spec.max_width,
    )
    counts = {
        "root_upper_covers": len(sol.root_covers),
        "full_upper_covers": len(sol.full_maxima_masks()),
        "closure_covers": sol.count(ConstraintSpec(contiguous=spec.contiguous, neighbor=spec.neighbor, wide=spec.wide, max_width=spec.max_width)),
    }
    if filt.has_global_constraints:
        counts["constrained_closure_covers"] = sol.count(filt)
    print(f"belief tree vertices (shared):       {len(tree.vertices)}")
    print(f"upper covers at the root:            {counts['root_upper_covers']}")
    print(f"upper covers over all observations:  {counts['full_upper_covers']}")
    print(f"closure covers (per-block filters):  {counts['closure_covers']}")
    if "constrained_closure_covers" in counts:
        print(f"closure covers (global filters too): {counts['constrained_closure_covers']}")
    if sol.no_sensing_required:
        print("no sensing required: every sensor map admits a plan")
    if args.out is not None:
        _emit(io.dumps(export.solution_document(sol, counts)), args.out, "solutions.json")
    if args.plans or args.verify:
        jobs = []
        for i, cover in enumerate(sol.root_covers, start=1):
            plan = extract_plan(sol, cover)
            jobs.append((pf.problem, plan, cover))
            if args.out is not None and args.plans:
                _emit(io.dump_plan(plan), args.out / "plans", f"plan-{i:04d}.json")
                _emit(io.dump_cover(cover), args.out / "plans", f"cover-{i:04d}.json")
        if args.verify:
            if args.workers > 1:
                with ProcessPoolExecutor(args.workers) as pool:
                    verdicts = list(pool.map(_check, jobs, chunksize=16))
            else:
                verdicts = [_check(j) for j in jobs]
            failed = [i for i, v in enumerate(verdicts, start=1) if v != "solves"]
            print(f"verified plans: {len(verdicts) - len(failed)}/{len(verdicts)} solve")
            if failed:
                return 1
    return 0


def cmd_verify(args):
    pf = io.parse_problem(Path(args.problem).read_bytes())
    plan = io.parse_plan(Path(args.plan).read_bytes())
    cover = io.parse_cover(Path(args.cover).read_bytes())
    report = solves(plan, pf.problem, cover)
    _emit(io.dumps(export.report_document(report)), args.out, "verdict.json")
    return 0 if report else 1


def cmd_oracle(args):
    pf = _load(args)
    bounds = OracleBounds(args.max_observations, args.max_vertices)
    spec = pf.spec if (pf.spec.has_block_constraints or pf.spec.has_global_constraints) else None
    truth = oracle(pf.problem, spec, bounds, action_subsets=pf.stipulation is not None, stipulation=pf.stipulation)
    sol = synthesize(_tree(args, pf), pf.spec)
    mine = set(sol.closure())
    missing = [c for c in truth if c not in mine]
    extra = sorted(mine - set(truth), key=Cover.key)
    doc = {
        "schema": "sensorsynth/oracle-diff",
        "version": io.VERSION,
        "oracle_covers": len(truth),
        "synth_covers": len(mine),
        "missing_from_synth": [[sorted(map(str, b)) for b in c.indexed()] for c in missing],
        "extra_in_synth": [[sorted(map(str, b)) for b in c.indexed()] for c in extra],
    }
    sys.stdout.write(io.dumps(doc))
    return 0 if not missing and not extra else 1


def cmd_scenario(args):
    opts = {"segments": args.segments} if args.segments else {}
    problem, spec = builtin_scenario(args.name, **opts)
    _emit(io.dump_problem(io.ProblemFile(problem, spec)), args.out, f"{args.name}.json")
    return 0


def cmd_tree(args):
    pf = _load(args)
    tree = _tree(args, pf)
    data = export.export(tree, args.format).decode("utf-8")
    _emit(data, args.out, "tree.dot" if args.format == "dot" else "tree.json")
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "scenario": cmd_scenario,
    "tree": cmd_tree,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except io.ProblemFileError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return 1
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SensorSynthError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
