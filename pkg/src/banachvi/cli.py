"""Command-line front end.

Subcommands::

    banachvi run      --problem example-4-1 --algorithm alg2 --out trace.csv
    banachvi compare  --problem example-4-1 --algorithm alg1 --algorithm alg2
    banachvi validate --problem example-4-1 --seed 3

Settings may come from a JSON config (``--config``); flags override it.
``VI_LOG`` sets the log level (DEBUG, INFO, WARNING, ...).
"""

import argparse
import json
import logging
import os
import sys
from importlib import resources

import jsonschema
import numpy as np

from . import registry, tracefile
from .algorithms import (StopRule, run_algorithm1, run_algorithm2, run_korpelevich,
                         run_thong, run_tseng)
from .exceptions import BanachVIError, ProblemError, ScheduleError
from .problems import (verify_bifunction_axioms, verify_ism, verify_norm_condition,
                       verify_relative_nonexpansive, verify_vi_membership)
from .schedules import LambdaRule, ScheduleSet, affine_rules

log = logging.getLogger("banachvi")

ALGORITHMS = ("alg1", "alg2", "korpelevich", "tseng", "thong")
EUCLIDEAN_ONLY = ("korpelevich", "tseng", "thong")

EXIT_OK, EXIT_ERROR, EXIT_MAX_ITER = 0, 1, 2


class CLIError(Exception):
    pass


def load_schema():
    return json.loads(resources.files("banachvi").joinpath("config_schema.json").read_text())


def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CLIError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise CLIError(f"config {path} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(cfg, load_schema())
    except jsonschema.ValidationError as exc:
        raise CLIError(f"invalid config: {exc.message}") from exc
    return cfg


def merged_config(args):
    """Config file values overridden by any flag the user gave."""
    cfg = load_config(args.config) if args.config else {}
    for key in ("problem", "max_iter", "tol_step", "tol_residual", "seed", "out"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if getattr(args, "x0", None) is not None:
        cfg["x0"] = args.x0
    if getattr(args, "strict_paper", False):
        cfg["strict_paper"] = True
    algs = getattr(args, "algorithm", None)
    if algs:
        cfg["algorithms"] = algs
        cfg["algorithm"] = algs[0]
    elif "algorithm" in cfg and "algorithms" not in cfg:
        cfg["algorithms"] = [cfg["algorithm"]]
    if "problem" not in cfg:
        raise CLIError("no problem given (use --problem or a config file)")
    return cfg


def parse_vector(text):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad vector {text!r}") from exc


def build_schedule(entry, algorithm, cfg):
    strict = cfg.get("strict_paper", False)
    base = entry.schedule(algorithm, strict_paper=strict)
    sc = cfg.get("schedule", {})
    lam = base.lambda_rule
    if "lambda" in sc:
        d = sc["lambda"]
        lam = LambdaRule(d["kind"], float(d.get("value", 0.99 if d["kind"] == "capped_harmonic" else 0.0)))
    alpha = affine_rules(sc["alpha"]) if "alpha" in sc else base.alpha_rules
    r = sc.get("r", base.r)
    return ScheduleSet(lam, alpha, r)


def run_one(entry, algorithm, cfg):
    p = entry.problem
    if algorithm in EUCLIDEAN_ONLY and not p.space.is_euclidean:
        raise ProblemError("algorithm requires euclidean space")
    x0 = np.array(cfg["x0"], dtype=float) if "x0" in cfg else entry.x0
    stop = StopRule(cfg.get("tol_step", 1e-8), cfg.get("tol_residual", 1e-8),
                    cfg.get("max_iter", 1000))
    if algorithm == "alg1":
        return run_algorithm1(p, build_schedule(entry, "alg1", cfg), x0, stop)
    if algorithm == "alg2":
        return run_algorithm2(p, build_schedule(entry, "alg2", cfg), x0, stop)
    step = cfg.get("step", entry.baseline_step)
    if algorithm == "korpelevich":
        return run_korpelevich(p, step, x0, stop)
    if algorithm == "tseng":
        return run_tseng(p, step, x0, stop)
    th = {**entry.thong, **cfg.get("thong", {})}
    return run_thong(p, th["gamma"], th["l"], th["mu"], x0, stop)


def fmt_point(x):
    return "(" + ", ".join("%.10g" % v for v in np.atleast_1d(x)) + ")"


def summary(problem_id, trace):
    last = trace.rows[-1] if trace.rows else None
    parts = [f"{trace.algorithm} on {problem_id}: {trace.status}",
             f"iterations={trace.iterations}",
             f"final={fmt_point(trace.final)}"]
    if last is not None:
        parts += [f"step_norm={last.step_norm:.3e}", f"xy_residual={last.xy_residual:.3e}"]
    if trace.final_phi is not None:
        parts.append(f"phi_to_solution={trace.final_phi:.3e}")
    return " ".join(parts)


def emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CLIError(f"cannot write {out}: {exc.strerror}") from exc


def cmd_run(args):
    cfg = merged_config(args)
    algs = cfg.get("algorithms") or []
    if not algs:
        raise CLIError("no algorithm given (use --algorithm or a config file)")
    if len(algs) > 1:
        raise CLIError("run takes one algorithm; use compare for several")
    entry = registry.get(cfg["problem"])
    trace = run_one(entry, algs[0], cfg)
    out = cfg.get("out")
    emit(tracefile.dumps(trace), out)
    print(summary(entry.problem_id, trace), file=sys.stdout if out else sys.stderr)
    return EXIT_OK if trace.status == "converged" else EXIT_MAX_ITER


def cmd_compare(args):
    cfg = merged_config(args)
    algs = cfg.get("algorithms") or []
    if not algs:
        raise CLIError("compare needs at least one algorithm")
    entry = registry.get(cfg["problem"])
    for a in algs:
        if a in EUCLIDEAN_ONLY and not entry.problem.space.is_euclidean:
            raise ProblemError("algorithm requires euclidean space")
    traces = [run_one(entry, a, cfg) for a in algs]
    out = cfg.get("out")
    emit(tracefile.dumps_compare(traces), out)
    for t in traces:
        print(summary(entry.problem_id, t), file=sys.stdout if out else sys.stderr)
    return EXIT_OK if all(t.status == "converged" for t in traces) else EXIT_MAX_ITER


def validation_reports(entry, seed, n_samples):
    p = entry.problem

    def rng():
        # each check gets its own stream so adding one does not shift the others
        return np.random.default_rng(seed)

    reports = [verify_ism(p, n_samples, rng=rng())]
    if p.bifunction is not None:
        reports += list(verify_bifunction_axioms(p.bifunction, p.feasible, n_samples,
                                                 rng=rng()).checks.values())
    if p.known_solution is not None:
        reports.append(verify_norm_condition(p, p.known_solution, n_samples, rng=rng()))
        reports.append(verify_vi_membership(p, p.known_solution, n_samples=n_samples, rng=rng()))
    if p.map is not None:
        reports.append(verify_relative_nonexpansive(p, n_samples, rng=rng()))
    return reports


def cmd_validate(args):
    cfg = merged_config(args)
    entry = registry.get(cfg["problem"])
    reports = validation_reports(entry, cfg.get("seed", 0), args.samples)
    for r in reports:
        print(r.line())
    ok = all(r.passed for r in reports)
    print(f"{entry.problem_id}: {'all checks pass' if ok else 'some checks FAIL'}")
    return EXIT_OK if ok else EXIT_ERROR


def build_parser():
    parser = argparse.ArgumentParser(prog="banachvi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--problem", help="registered problem id")
    common.add_argument("--seed", type=int, help="random seed for sampled checks")
    common.add_argument("--out", help="output CSV path (default: stdout)")

    solve = argparse.ArgumentParser(add_help=False)
    solve.add_argument("--algorithm", action="append", choices=ALGORITHMS,
                       help="algorithm (repeat for compare)")
    solve.add_argument("--x0", type=parse_vector, help="comma-separated start point")
    solve.add_argument("--max-iter", type=int)
    solve.add_argument("--tol-step", type=float)
    solve.add_argument("--tol-residual", type=float)
    solve.add_argument("--strict-paper", action="store_true",
                       help="use lambda_n = 1/n without the step cap")

    p_run = sub.add_parser("run", parents=[common, solve], help="run one algorithm")
    p_run.set_defaults(func=cmd_run)
    p_cmp = sub.add_parser("compare", parents=[common, solve], help="run several algorithms")
    p_cmp.set_defaults(func=cmd_compare)
    p_val = sub.add_parser("validate", parents=[common], help="check problem hypotheses")
    p_val.add_argument("--samples", type=int, default=10_000)
    p_val.set_defaults(func=cmd_validate)
    return parser


def setup_logging():
    level = os.environ.get("VI_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except registry.UnknownProblem as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ScheduleError as exc:
        print(f"error: invalid schedule: {exc}", file=sys.stderr)
    except (CLIError, BanachVIError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
