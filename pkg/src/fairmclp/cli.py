"""Command-line entry point ``fmclp``.

Exit codes: 0 success, 2 usage or input error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from fairmclp.experiments import (ConfigError, InstanceFormatError, gen_instance, load_grid_config,
                                  load_instance, read_results, run_grid, summarize, write_instance,
                                  write_table)
from fairmclp.fairness import FAMILIES, FairnessSpec, WeightError, parse_alpha
from fairmclp.geometry import Norm
from fairmclp.metrics import Baselines, BaselineError, coverage_percentage, gini_index, \
    price_of_efficiency, price_of_fairness
from fairmclp.model_ir import ExportError, build_continuous, build_continuous_cut_model, build_discrete, export
from fairmclp.solver import MODES, SolveOptions, SolverError, solve

log = logging.getLogger("fmclp")

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _alpha(text: str) -> Fraction:
    try:
        return parse_alpha(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid alpha {text!r}: {exc}") from None


def _add_instance_args(sp):
    sp.add_argument("--instance", required=True, help="instance CSV (x,y,w)")
    sp.add_argument("--n", type=int, default=None, help="keep only the first n demand points")
    sp.add_argument("--normalize", action="store_true", help="min-max rescale coordinates to [0,1]")
    sp.add_argument("--norm", default="euclidean", help="euclidean, l1, linf or ltau:<tau>")


def _add_problem_args(sp, need_spec=True):
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--R", type=float, required=True)
    sp.add_argument("--space", choices=["disc", "cont"], default="disc")
    if need_spec:
        sp.add_argument("--family", choices=FAMILIES, default="W")
        sp.add_argument("--alpha", type=_alpha, default=Fraction(0))
        sp.add_argument("--k", type=int, default=None, help="k for the K family (default ceil(p/2))")
        sp.add_argument("--beta-mix", type=Fraction, default=None, help="mixing weight of the D family")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fmclp", description="Fair maximal covering location solver.")
    ap.add_argument("--json", action="store_true", help="machine-readable errors on stderr")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    sp = sub.add_parser("gen", help="generate a random instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("solve", help="solve one problem")
    _add_instance_args(sp)
    _add_problem_args(sp)
    sp.add_argument("--mode", choices=MODES, default=None, help="default: bb (disc) or fds (cont)")
    sp.add_argument("--time-limit", type=float, default=7200.0)
    sp.add_argument("--out", default=None, help="write the solution JSON here instead of stdout")

    sp = sub.add_parser("export-model", help="write the optimisation model")
    _add_instance_args(sp)
    _add_problem_args(sp)
    sp.add_argument("--format", choices=["json", "lp"], default="json")
    sp.add_argument("--formulation", choices=["bigm", "cuts"], default="cuts",
                    help="continuous space: big-M distance model or cluster-cut model")
    sp.add_argument("--breakpoints", type=int, default=32, help="tangent rows for alpha = 1")
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("metrics", help="PoF, PoE and Gini against exact baselines")
    _add_instance_args(sp)
    _add_problem_args(sp)
    sp.add_argument("--solution", default=None, help="solution JSON from 'solve' (otherwise solved here)")
    sp.add_argument("--against", default=None, help="baselines JSON to reuse; computed exactly if omitted")
    sp.add_argument("--save-baselines", default=None)

    sp = sub.add_parser("grid", help="run an experiment grid")
    sp.add_argument("--config", required=True)
    sp.add_argument("--instance", default=None, help="instance CSV (default: generated from the seed)")
    sp.add_argument("--normalize", action="store_true")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("summarize", help="gap buckets and mean metrics of a result CSV")
    sp.add_argument("results")
    sp.add_argument("--out-prefix", required=True)
    return ap


def _spec(args) -> FairnessSpec:
    params = {}
    if args.family == "K" and args.k is not None:
        params["k"] = args.k
    if args.family == "D" and args.beta_mix is not None:
        params["beta_mix"] = args.beta_mix
    if args.family == "C" and args.alpha != 0:
        log.warning("alpha ignored for C: the minimum family is solved with alpha = 0")
        args.alpha = Fraction(0)
    return FairnessSpec.of(args.family, args.p, args.alpha, **params)


def _instance(args):
    return load_instance(args.instance, n=args.n, normalize=args.normalize, norm=Norm.parse(args.norm))


def _emit(data: bytes | str, out):
    if isinstance(data, str):
        data = data.encode()
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _opts(args) -> SolveOptions:
    mode = args.mode or ("bb" if args.space == "disc" else "fds")
    return SolveOptions(time_limit=args.time_limit, mode=mode)


def cmd_gen(args):
    write_instance(gen_instance(args.n, args.d, args.seed), args.out)


def cmd_solve(args):
    inst = _instance(args)
    spec = _spec(args)
    sol = solve(inst, spec, args.p, args.R, args.space, _opts(args))
    _emit(json.dumps(sol.to_json(), indent=1) + "\n", args.out)


def cmd_export(args):
    inst = _instance(args)
    spec = _spec(args)
    if args.space == "disc":
        model = build_discrete(inst, spec, args.p, args.R, breakpoints=args.breakpoints)
    elif args.formulation == "bigm":
        model = build_continuous(inst, spec, args.p, args.R, breakpoints=args.breakpoints)
    else:
        model = build_continuous_cut_model(inst, spec, args.p, args.R, breakpoints=args.breakpoints)
    try:
        data = export(model, args.format)
    except ExportError as exc:
        raise UsageError(str(exc)) from None
    _emit(data, args.out)


def cmd_metrics(args):
    inst = _instance(args)
    if args.against:
        b = json.loads(Path(args.against).read_text())
        base = Baselines(**b)
        if (base.instance_key, base.p, base.R, base.space) != (inst.digest(), args.p, args.R, args.space):
            raise BaselineError("baselines file refers to a different problem")
    else:
        mode = "bb" if args.space == "disc" else "fds"
        base = Baselines.compute(inst, args.p, args.R, args.space, SolveOptions(mode=mode))
    if args.save_baselines:
        Path(args.save_baselines).write_text(json.dumps(base.__dict__, indent=1) + "\n")
    if args.solution:
        data = json.loads(Path(args.solution).read_text())
        if data.get("instance") != inst.digest() or data.get("R") != args.R or data.get("space") != args.space:
            raise BaselineError("solution refers to a different problem")
        W, status = data["W"], data["status"]
        if len(W) != args.p:
            raise BaselineError("solution has a different number of facilities")
    else:
        sol = solve(inst, _spec(args), args.p, args.R, args.space,
                    SolveOptions(mode="bb" if args.space == "disc" else "fds"))
        W, status = list(sol.W), sol.status.value
    out = {"PoF": price_of_fairness(W, base.sum_baseline), "PoE": price_of_efficiency(W, base.min_baseline),
           "Gini": gini_index(W), "coverage_pct": coverage_percentage(W, inst), "W": W, "status": status,
           "baselines": {"sum_baseline": base.sum_baseline, "min_baseline": base.min_baseline}}
    _emit(json.dumps(out, indent=1) + "\n", None)


def cmd_grid(args):
    grid = load_grid_config(args.config)
    path = args.instance or grid.instance
    inst = load_instance(path, normalize=args.normalize) if path else None
    rows = run_grid(grid, inst, args.out)
    failed = sum(1 for r in rows if r["status"].startswith("Error"))
    log.info("%d rows written to %s (%d failed cells)", len(rows), args.out, failed)


def cmd_summarize(args):
    gaps, fams = summarize(read_results(args.results))
    write_table(gaps, f"{args.out_prefix}_gaps.csv")
    write_table(fams, f"{args.out_prefix}_fairness.csv")


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "export-model": cmd_export, "metrics": cmd_metrics,
            "grid": cmd_grid, "summarize": cmd_summarize}


def _fail(args_json: bool, code: int, kind: str, msg: str) -> int:
    if args_json:
        sys.stderr.write(json.dumps({"error": kind, "message": msg, "exit_code": code}) + "\n")
    else:
        sys.stderr.write(f"fmclp: {kind}: {msg}\n")
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--json" in argv
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail(want_json, EXIT_USAGE, "usage", str(exc))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="fmclp: %(levelname)s: %(message)s")
    try:
        COMMANDS[args.cmd](args)
    except UsageError as exc:
        return _fail(args.json, EXIT_USAGE, "usage", str(exc))
    except (InstanceFormatError, ConfigError, WeightError, BaselineError, FileNotFoundError,
            ValueError) as exc:
        return _fail(args.json, EXIT_USAGE, type(exc).__name__, str(exc))
    except (SolverError, RuntimeError) as exc:
        return _fail(args.json, EXIT_SOLVER, type(exc).__name__, str(exc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
