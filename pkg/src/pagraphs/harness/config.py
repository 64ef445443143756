"""Experiment configuration files (INI) and their content hash.

Layout::

    [experiment]
    model = remy
    n = 100, 1000, 10000
    replicates = 20
    seed = 1
    diagnostics = diameter, height
    csv = out/remy.csv
    json = out/remy.json

    [params]
    seeds = standard

    [targets]
    # statistic = target, tolerance   (checked on the replicate mean at the largest n)
    n_vertices = 10001, 0

Parameter values are parsed as numbers when they look like numbers.
"""
import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field

from ..errors import ParameterError
from .models import MODELS, STATISTICS, model_params


def _value(s):
    s = s.strip()
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            pass
    return s


def _list(s):
    return [x.strip() for x in s.replace("\n", ",").split(",") if x.strip()]


@dataclass
class ExperimentConfig:
    model: str
    params: dict = field(default_factory=dict)
    n_values: list = field(default_factory=lambda: [100])
    replicates: int = 1
    seed: int = 0
    diagnostics: list = field(default_factory=list)
    csv: str = None
    json: str = None
    targets: dict = field(default_factory=dict)

    def validate(self):
        if self.model not in MODELS:
            raise ParameterError(f"unknown model {self.model!r}; known: {sorted(MODELS)}")
        self.params = model_params(self.model, self.params)
        if not self.n_values or any(int(n) < 1 for n in self.n_values):
            raise ParameterError("n values must be positive integers")
        self.n_values = [int(n) for n in self.n_values]
        if self.replicates < 1:
            raise ParameterError("replicates must be at least 1")
        for d in self.diagnostics:
            if d not in STATISTICS:
                raise ParameterError(f"unknown diagnostic {d!r}; known: {sorted(STATISTICS)}")
        for name, tt in self.targets.items():
            if name not in self.diagnostics:
                raise ParameterError(f"target for {name!r} which is not a diagnostic")
            if len(tt) != 2 or tt[1] < 0:
                raise ParameterError(f"target for {name!r} must be 'value, tolerance'")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ParameterError("seed must be a nonnegative integer")
        return self

    def canonical(self):
        """Everything that determines the results (output paths excluded)."""
        d = asdict(self)
        d.pop("csv")
        d.pop("json")
        d["targets"] = {k: list(v) for k, v in sorted(self.targets.items())}
        return json.dumps(d, sort_keys=True, default=str)

    def hash(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def read_config(path_or_text):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    if "\n" in path_or_text or "[" in path_or_text:
        cp.read_string(path_or_text)
    else:
        with open(path_or_text) as fh:
            cp.read_file(fh)
    if "experiment" not in cp:
        raise ParameterError("config needs an [experiment] section")
    e = cp["experiment"]
    if "model" not in e:
        raise ParameterError("config needs a model")
    targets = {}
    if "targets" in cp:
        for k, v in cp["targets"].items():
            parts = [float(x) for x in _list(v)]
            targets[k] = tuple(parts)
    cfg = ExperimentConfig(
        model=e["model"].strip(),
        params={k: _value(v) for k, v in cp["params"].items()} if "params" in cp else {},
        n_values=[int(float(x)) for x in _list(e.get("n", "100"))],
        replicates=int(e.get("replicates", "1")),
        seed=int(e.get("seed", "0")),
        diagnostics=_list(e.get("diagnostics", "")),
        csv=e.get("csv"),
        json=e.get("json"),
        targets=targets,
    )
    return cfg.validate()
