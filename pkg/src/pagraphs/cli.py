"""Command line: simulate, analyze, experiment, verify."""
import argparse
import configparser
import csv
import json
import sys

import numpy as np

from .errors import ParameterError, ValidationError
from .harness.acceptance import run_suite
from .harness.config import _value, read_config
from .harness.experiment import run_experiment
from .harness.models import MODELS, build, model_params
from .harness.snapshots import load_for_analysis, write_snapshot
from .harness.stats import distance_stats

ANALYZE_STATS = ("diameter", "diameter_exact", "height", "n_points", "mean_distance")


def read_params(path):
    """key = value lines, optionally under a [params] section."""
    if path is None:
        return {}
    with open(path) as fh:
        text = fh.read()
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    if not text.lstrip().startswith("["):
        text = "[params]\n" + text
    cp.read_string(text)
    section = cp["params"] if "params" in cp else cp[cp.sections()[0]]
    return {k: _value(v) for k, v in section.items()}


def cmd_simulate(args):
    params = model_params(args.model, read_params(args.params))
    for k, v in (args.set or []):
        params[k] = _value(v)
    rng = np.random.default_rng(args.seed)
    obj = build(args.model, params, args.n, rng, mode=args.mode)
    files = write_snapshot(obj, args.out, {"model": args.model, "params": params, "n": args.n,
                                           "seed": args.seed, "mode": args.mode})
    print(f"wrote {', '.join(files)} to {args.out}")
    return 0


def cmd_analyze(args):
    stats = [s.strip() for s in args.stats.split(",") if s.strip()]
    for s in stats:
        if s not in ANALYZE_STATS:
            raise ParameterError(f"unknown statistic {s!r}; known: {', '.join(ANALYZE_STATS)}")
    obj = load_for_analysis(args.input, args.which)
    rng = np.random.default_rng(args.seed)
    summary = distance_stats(obj, args.pairs, rng).as_dict()
    rows = [(s, summary[s]) for s in stats]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("statistic", "value"))
        for s, v in rows:
            w.writerow((s, repr(float(v)) if not isinstance(v, bool) else int(v)))
    finally:
        if args.out:
            out.close()
    return 0


def cmd_experiment(args):
    cfg = read_config(args.config)
    if args.csv:
        cfg.csv = args.csv
    if args.json:
        cfg.json = args.json
    report = run_experiment(cfg, workers=args.workers)
    for e in report.entries:
        print(e.line())
    print(f"config hash {report.provenance['config_hash']}")
    return 0 if report.passed else 1


def cmd_verify(args):
    report = run_suite(args.suite, seed=args.seed, only=args.only)
    if args.json:
        report.write_json(args.json)
    n_pass = sum(e.passed is True and e.error is None for e in report.entries)
    print(f"{n_pass}/{len(report.entries)} checks passed")
    return 0 if report.passed else 1


def build_parser():
    p = argparse.ArgumentParser(prog="pagraphs", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="grow one model instance and write a snapshot directory")
    s.add_argument("--model", required=True, choices=sorted(MODELS))
    s.add_argument("--params", help="key = value parameter file")
    s.add_argument("--set", nargs=2, action="append", metavar=("KEY", "VALUE"), help="override one parameter")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", default="both", choices=("direct", "decorated", "both"))
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(fn=cmd_simulate)

    a = sub.add_parser("analyze", help="distance statistics of a snapshot or graph/decoration file")
    a.add_argument("--in", dest="input", required=True)
    a.add_argument("--stats", default="diameter,height,mean_distance")
    a.add_argument("--which", default="graph", choices=("graph", "decoration", "loop_decoration"))
    a.add_argument("--pairs", type=int, default=1000, help="sampled point pairs for the distance law")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out", help="CSV path (default stdout)")
    a.set_defaults(fn=cmd_analyze)

    e = sub.add_parser("experiment", help="run a replicated experiment from an INI config")
    e.add_argument("--config", required=True)
    e.add_argument("--csv")
    e.add_argument("--json")
    e.add_argument("--workers", type=int, help="worker processes (default PAGRAPHS_THREADS or 1)")
    e.set_defaults(fn=cmd_experiment)

    v = sub.add_parser("verify", help="run a shipped check suite (exit code 0 iff all pass)")
    v.add_argument("--suite", default="acceptance", help="suite name (acceptance, smoke) or .ini path")
    v.add_argument("--seed", type=int, help="override the suite's master seed")
    v.add_argument("--only", nargs="+", help="section names to run")
    v.add_argument("--json", help="write the report here")
    v.set_defaults(fn=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParameterError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
