"""Replicated experiments with CSV rows and a JSON report.

CSV columns, in this order: replicate, n, statistic, value.  Rows are sorted by
(replicate, n, diagnostic order) and values are written with repr, so the
same config and seed give identical bytes whatever the worker count.
"""
import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import __version__
from .models import build, mean_and_stderr, statistic

CSV_COLUMNS = ("replicate", "n", "statistic", "value")


def worker_count():
    """Worker processes, from PAGRAPHS_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("PAGRAPHS_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class DiagnosticResult:
    name: str
    estimate: float
    target: float = None
    tolerance: float = None
    passed: bool = None
    sample_size: int = 0
    runtime: float = 0.0
    stderr: float = None
    rule: str = ""
    detail: str = ""
    error: str = None

    def line(self):
        status = {True: "PASS", False: "FAIL", None: "INFO"}[self.passed]
        if self.error:
            status = "FAIL"
        tgt = "" if self.target is None else f" target={self.target:.6g} tol={self.tolerance:.3g}"
        est = "nan" if self.estimate is None else f"{self.estimate:.6g}"
        msg = f"{status} {self.name}: estimate={est}{tgt} n={self.sample_size} ({self.runtime:.1f}s)"
        if self.rule:
            msg += f" [{self.rule}]"
        if self.error:
            msg += f" error: {self.error}"
        return msg


@dataclass
class StatReport:
    entries: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(e.passed is not False and e.error is None for e in self.entries)

    def to_dict(self):
        return {"provenance": self.provenance, "passed": self.passed,
                "entries": [asdict(e) for e in self.entries]}

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


def replicate_rng(seed, replicate, n):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replicate, n)))


def _replicate(task):
    model, params, n_values, seed, r, diagnostics = task
    rows, errors = [], []
    for n in n_values:
        rng = replicate_rng(seed, r, n)
        try:
            obj = build(model, params, n, rng)
        except Exception as exc:             # noqa: BLE001 -- recorded per diagnostic
            errors.extend((d, f"replicate {r}, n={n}: {exc}") for d in diagnostics)
            continue
        cache = {}
        for d in diagnostics:
            try:
                rows.append((r, n, d, statistic(d, obj, rng, cache)))
            except Exception as exc:         # noqa: BLE001
                errors.append((d, f"replicate {r}, n={n}: {exc}"))
    return rows, errors


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r, n, d, v in rows:
        w.writerow((r, n, d, repr(float(v))))
    return buf.getvalue()


def run_experiment(config, workers=None):
    """Run all replicates, write the CSV/JSON outputs named in the config and
    return the StatReport (one entry per diagnostic, at the largest n)."""
    config.validate()
    t0 = time.perf_counter()
    workers = worker_count() if workers is None else workers
    tasks = [(config.model, config.params, config.n_values, config.seed, r, config.diagnostics)
             for r in range(config.replicates)]
    if workers > 1 and len(tasks) > 1 and config.diagnostics:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_replicate, tasks))
    else:
        results = [_replicate(t) for t in tasks]
    order = {d: i for i, d in enumerate(config.diagnostics)}
    rows = sorted((row for res in results for row in res[0]), key=lambda x: (x[0], x[1], order[x[2]]))
    errors = {}
    for _, errs in results:
        for d, msg in errs:
            errors.setdefault(d, []).append(msg)
    runtime = time.perf_counter() - t0
    n_top = max(config.n_values)
    entries = []
    for d in config.diagnostics:
        vals = [v for r, n, s, v in rows if s == d and n == n_top]
        est, se = mean_and_stderr(vals) if vals else (None, None)
        res = DiagnosticResult(d, est, sample_size=len(vals), runtime=runtime, stderr=se,
                               detail=f"replicate mean at n={n_top}")
        if d in config.targets:
            target, tol = config.targets[d]
            res.target, res.tolerance = target, tol
            res.rule = "|estimate - target| <= tolerance"
            res.passed = est is not None and abs(est - target) <= tol
        if d in errors:
            res.error = "; ".join(errors[d][:3]) + (f" (+{len(errors[d]) - 3} more)" if len(errors[d]) > 3 else "")
            res.passed = False
        entries.append(res)
    report = StatReport(entries, {"config_hash": config.hash(), "seed": config.seed,
                                  "model": config.model, "params": config.params,
                                  "n_values": config.n_values, "replicates": config.replicates,
                                  "version": __version__, "seeding": "SeedSequence(seed, spawn_key=(replicate, n))"})
    if config.csv:
        _ensure_dir(config.csv)
        with open(config.csv, "w", newline="") as fh:
            fh.write(rows_to_csv(rows))
    if config.json:
        _ensure_dir(config.json)
        report.write_json(config.json)
    report.rows = rows
    return report


def _ensure_dir(path):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
