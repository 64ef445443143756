"""Named growth models and per-replicate statistics for the experiment driver."""
import numpy as np

from ..distributions import sample_mlmc
from ..errors import ParameterError
from ..growth import (FitnessSequence, GrowthState, MultiGraph, alphagamma_grow, lpam_grow,
                      marchal_grow, pa_grow, remy_generalized, standard_seeds, two_line_seeds,
                      wrt_grow)
from .stats import distance_stats

SEED_GRAPHS = {
    "edge": MultiGraph.single_edge,
    "loop": MultiGraph.self_loop,
    "star3": lambda: MultiGraph.star(3),
    "path2": lambda: MultiGraph.path(2),
}


def _seed_graph(name):
    try:
        return SEED_GRAPHS[name]()
    except KeyError:
        raise ParameterError(f"unknown seed graph {name!r}; known: {sorted(SEED_GRAPHS)}") from None


def _remy(p, n, rng, mode):
    seeds = p.get("seeds", "standard")
    if seeds == "standard":
        s = standard_seeds()
    elif seeds == "two-line":
        s = two_line_seeds()
    else:
        s = _seed_graph(seeds)
    return remy_generalized(s, n, rng, mode=mode)


MODELS = {
    "remy": (_remy, {"seeds": "standard"}),
    "marchal": (lambda p, n, rng, mode: marchal_grow(_seed_graph(p.get("seed", "edge")), float(p["alpha"]),
                                                   n, rng, mode=mode), {"alpha": 1.5, "seed": "edge"}),
    "alphagamma": (lambda p, n, rng, mode: alphagamma_grow(float(p["alpha"]), float(p["gamma"]), n, rng,
                                                         mode=mode), {"alpha": 0.5, "gamma": 0.3}),
    "lpam": (lambda p, n, rng, mode: lpam_grow(float(p["delta"]), n, rng, mode=mode), {"delta": 0.0}),
    "pa": (lambda p, n, rng, mode: pa_grow(FitnessSequence.constant(float(p["a"]), float(p.get("b", p["a"]))),
                                           n, rng), {"a": 1.0, "b": 1.0}),
    "wrt-mlmc": (lambda p, n, rng, mode: wrt_grow(sample_mlmc(float(p["alpha"]), float(p["theta"]), n,
                                                               rng).increments, n, rng),
                 {"alpha": 0.5, "theta": 0.5}),
}


def model_params(model, params):
    """Defaults of ``model`` overridden by ``params`` (values kept as given)."""
    if model not in MODELS:
        raise ParameterError(f"unknown model {model!r}; known: {sorted(MODELS)}")
    out = dict(MODELS[model][1])
    out.update(params or {})
    return out


def build(model, params, n, rng, mode="direct"):
    """GrowthState (graph models) or RecursiveTree (pa, wrt-mlmc) with n steps."""
    p = model_params(model, params)
    return MODELS[model][0](p, int(n), rng, mode)


def _graph(obj):
    if isinstance(obj, GrowthState):
        return obj.graph
    parents = obj.parents
    return MultiGraph(parents.size, [(int(parents[k]), k) for k in range(1, parents.size)], root=0)


def _first_degree(obj):
    if isinstance(obj, GrowthState):
        return float(obj.pa_tree().out_degrees()[0])
    return float(obj.out_degrees()[0])


def _summary(obj, rng, cache):
    if "summary" not in cache:
        cache["summary"] = distance_stats(_graph(obj), 1000, rng)
    return cache["summary"]


def _height(obj, rng, cache):
    if isinstance(obj, GrowthState):
        return _summary(obj, rng, cache).height
    return float(obj.height())


STATISTICS = {
    "n_vertices": lambda obj, rng, cache: float(_graph(obj).n_vertices),
    "n_edges": lambda obj, rng, cache: float(_graph(obj).n_edges),
    "diameter": lambda obj, rng, cache: _summary(obj, rng, cache).diameter,
    "height": _height,
    "mean_distance": lambda obj, rng, cache: _summary(obj, rng, cache).as_dict()["mean_distance"],
    "first_degree": lambda obj, rng, cache: _first_degree(obj),
    "n_blocks": lambda obj, rng, cache: float(len(obj.block_parents) if isinstance(obj, GrowthState)
                                              else len(obj)),
}


def statistic(name, obj, rng, cache=None):
    """Value of a named statistic; pass the same ``cache`` dict for several
    statistics of one object to share the distance summary."""
    if name not in STATISTICS:
        raise ParameterError(f"unknown statistic {name!r}; known: {sorted(STATISTICS)}")
    return float(STATISTICS[name](obj, rng, {} if cache is None else cache))


def graph_of(obj):
    return _graph(obj)


def describe_models():
    return {m: dict(d) for m, (_, d) in MODELS.items()}


def mean_and_stderr(values):
    v = np.asarray(values, dtype=float)
    se = float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else float("nan")
    return float(v.mean()), se
