"""Named statistical and exact checks, run from suite files (suites/*.ini).

Each check takes its section of the suite file (a dict of strings) and a
Generator, and returns a DiagnosticResult whose ``passed`` follows the rule
stated in ``rule``.
"""
import configparser
import math
import time
from importlib import resources

import numpy as np
from scipy import stats as sps

from ..distributions import (crp_table_count, generalized_urn, generalized_urn_limit, ml_moment,
                             polya_urn, sample_mlmc)
from ..errors import ParameterError
from ..glue import Block, Decoration, GluedSpace, measure_distance, truncation_gap_bound
from ..growth import (EDGE, FitnessSequence, MultiGraph, alphagamma_grow, degree_measure,
                      looptree_from_rotation, lpam_grow, marchal_grow, pa_grow, remy_diameters,
                      remy_generalized, remy_height_sup, remy_v2_decompose, standard_seeds,
                      two_line_seeds, uniform_measure, weight_measure, wrt_grow)
from ..growth.marchal import block_weight
from ..limits import (SelfSimilarSpec, leaf_dimension_estimate, remy_leaf_depths,
                      root_distance_samples, segment_depths, self_similar_sample,
                      uniform_point_measure, unit_segment_law)
from ..ulam import ROOT, PlaneTree, plane_tree_closure
from .experiment import DiagnosticResult, StatReport
from .stats import loglog_slope

CHECKS = {}


def check(name):
    def deco(fn):
        CHECKS[name] = fn
        return fn
    return deco


def _f(p, key, default=None):
    return float(p[key]) if key in p else default


def _i(p, key, default=None):
    return int(float(p[key])) if key in p else default


def _result(name, estimate, target, tol, passed, size, t0, rule, detail="", stderr=None):
    return DiagnosticResult(name, float(estimate), None if target is None else float(target),
                            None if tol is None else float(tol), bool(passed), int(size),
                            time.perf_counter() - t0, stderr, rule, detail)


def _rel_check(name, est, target, rel, size, t0, detail="", stderr=None):
    ok = abs(est - target) <= rel * abs(target)
    return _result(name, est, target, rel * abs(target), ok, size, t0,
                   f"|estimate - target| <= {rel:g} * target", detail, stderr)


# ---------------------------------------------------------------- exact representation checks

def _dual_models(n, rng, which):
    for name in which:
        if name == "remy":
            st = remy_generalized(standard_seeds(), n, rng)
            yield name, st.decorated_distances(), st.direct_distances()
        elif name == "remy-v2":
            st = remy_generalized(two_line_seeds(), n, rng)
            v2 = remy_v2_decompose(st)
            yield name, v2.decorated_distances(), st.direct_distances()
        elif name == "marchal":
            st = marchal_grow(MultiGraph.single_edge(), 1.5, n, rng)
            yield name, st.decorated_distances(), st.direct_distances()
        elif name == "alphagamma":
            st = alphagamma_grow(0.5, 0.3, n, rng)
            yield name + "/tree", st.decorated_distances(), st.direct_distances()
            yield name + "/loop", st.decorated_loop_distances(), st.direct_loop_distances()
        elif name == "lpam":
            st = lpam_grow(0.0, n, rng)
            yield name + "/loop", st.decorated_loop_distances(), st.direct_loop_distances()
        else:
            raise ParameterError(f"unknown model {name!r}")


@check("dual_representation")
def dual_representation(p, rng):
    """Decorated gluing and direct BFS give identical distance matrices."""
    t0 = time.perf_counter()
    n = _i(p, "n", 500)
    models = [m.strip() for m in p.get("models", "remy, remy-v2, marchal, alphagamma, lpam").split(",")]
    worst, parts = 0.0, []
    for name, dec, direct in _dual_models(n, rng, models):
        gap = float(np.max(np.abs(dec - direct))) if dec.shape == direct.shape else math.inf
        parts.append(f"{name}:{gap:g}")
        worst = max(worst, gap)
    return _result("dual_representation", worst, 0.0, 0.0, worst == 0.0, len(parts), t0,
                   "max |decorated - direct| == 0", " ".join(parts))


def _lpam_loop_counts(rotation, root):
    """Number of looptree vertices at every step of an LPAM run, read off the
    final rotation: edge f and vertex f+1 appear at step f, and at step k the
    loops of the tree so far cover the edges f <= k seen around some non-root
    vertex v <= k+1."""
    n_edges = len(rotation) - 1
    appear = np.full(n_edges, np.iinfo(np.int64).max)
    for v, cyc in enumerate(rotation):
        if v == root:
            continue
        for f in cyc:
            appear[f] = min(appear[f], v - 1)
    born = np.maximum(np.arange(n_edges), appear)
    return np.cumsum(np.bincount(born[born < n_edges], minlength=n_edges))


def _rotation_violations(rotation, edges):
    """Each edge (a, b) opens the rotation of its child b and occurs once around a."""
    bad = 0
    for e, (a, b) in enumerate(edges):
        bad += not rotation[b] or rotation[b][0] != e
        bad += rotation[a].count(e) != (1 if a != b else 2)
    return bad


@check("counting_identities")
def counting_identities(p, rng):
    """Edge counts, Marchal weights, alpha-gamma leaf weights and looptree sizes at every step,
    recounted from a replay of the growth trace."""
    t0 = time.perf_counter()
    n = _i(p, "n", 10**4)
    bad = {}

    # generalized Remy with cycling seeds: |E(H_k)| = sum_{i<=k} a_i + (k-1)
    seeds = [MultiGraph.single_edge(), MultiGraph.path(2), MultiGraph.star(3)]
    get = lambda k: seeds[(k - 1) % 3]
    st = remy_generalized(get, n, rng, mode="direct")
    g = get(1).copy()
    a_sum, errs = get(1).n_edges, 0
    for rec in st.trace:
        k = int(rec["step"])
        g.split_edge(int(rec["element"]))
        z = g.n_vertices - 1
        seed = get(k + 1)
        vmap = {seed.root: z}
        for v in range(seed.n_vertices):
            if v != seed.root:
                vmap[v] = g.add_vertex()
        for x, y in seed.edges:
            g.add_edge(vmap[x], vmap[y])
        a_sum += seed.n_edges
        errs += g.n_edges != a_sum + k
    errs += g.edges != st.graph.edges
    bad["remy"] = errs

    # Marchal: total weight = w(G) + alpha (k-1), as integer pairs (P, Q) meaning P + Q alpha
    alpha = _f(p, "alpha", 1.5)
    seed = MultiGraph.single_edge()
    st = marchal_grow(seed, alpha, n, rng, mode="direct")
    deg = np.zeros(seed.n_vertices + 2 * n, dtype=np.int64)
    deg[:seed.n_vertices] = seed.degrees()
    ne, nv = seed.n_edges, seed.n_vertices
    heavy_sum = int(np.sum(deg[deg >= 3] - 1))
    n_heavy = int(np.sum(deg >= 3))
    P0, Q0 = -ne + heavy_sum, ne - n_heavy      # edges weigh alpha-1, heavy vertices d-1-alpha
    ends = [list(e) for e in seed.edges]
    totals = st.extra["weight_totals"]
    errs = 0

    def bump(v):
        nonlocal heavy_sum, n_heavy
        d = deg[v]
        if d >= 3:
            heavy_sum -= d - 1
            n_heavy -= 1
        deg[v] = d + 1
        if d + 1 >= 3:
            heavy_sum += d
            n_heavy += 1

    for rec in st.trace:
        k = int(rec["step"])
        if rec["kind"] == EDGE:
            e = int(rec["element"])
            a, b = ends[e]
            z, leaf = nv, nv + 1
            ends[e] = [a, z]
            ends.extend([[z, b], [z, leaf]])
            nv += 2
            ne += 2
            deg[z] = 2
            bump(z)
            deg[leaf] = 1
        else:
            v = int(rec["element"])
            leaf = nv
            ends.append([v, leaf])
            nv += 1
            ne += 1
            bump(v)
            deg[leaf] = 1
        P, Q = -ne + heavy_sum, ne - n_heavy
        errs += (P, Q) != (P0, Q0 + k)
        errs += k == n - 1 and not math.isclose(P + Q * alpha, block_weight(seed, alpha) + alpha * k)
        errs += (P, Q) != tuple(totals[k])
    errs += [tuple(e) for e in ends] != [tuple(e) for e in st.graph.edges]
    bad["marchal"] = errs

    # alpha-gamma: leaf-edge weight = (1 - alpha) * (number of leaves) = (1 - alpha) k
    ag, gam = _f(p, "ag_alpha", 0.5), _f(p, "ag_gamma", 0.3)
    st = alphagamma_grow(ag, gam, n, rng, mode="direct")
    deg = np.zeros(2 * n + 2, dtype=np.int64)
    deg[0] = deg[1] = 1
    leaves, nv = 1, 2
    ends = [[0, 1]]
    lw = st.extra["leaf_edge_weight"]
    errs = 0
    for rec in st.trace:
        k = int(rec["step"])
        if rec["kind"] == EDGE:
            e = int(rec["element"])
            a, b = ends[e]
            z, leaf = nv, nv + 1
            ends[e] = [a, z]
            ends.extend([[z, b], [z, leaf]])
            deg[z], deg[leaf] = 3, 1
            nv += 2
            leaves += 1
        else:
            v = int(rec["element"])
            leaf = nv
            ends.append([v, leaf])
            if deg[v] == 1 and v != 0:
                leaves -= 1
            deg[v] += 1
            deg[leaf] = 1
            nv += 1
            leaves += 1
        errs += leaves != k + 1
        errs += not math.isclose((1 - ag) * leaves, lw[k], rel_tol=0, abs_tol=1e-9 * (k + 1))
    errs += [tuple(e) for e in ends] != [tuple(e) for e in st.graph.edges]
    bad["alphagamma"] = errs

    # looptree vertices = tree edges (LPAM delta=0 and alpha-gamma rotations)
    lp = lpam_grow(_f(p, "delta", 0.0), n, rng, mode="direct")
    errs = int(np.sum(_lpam_loop_counts(lp.rotation, lp.graph.root) != np.arange(1, n + 1)))
    for state in (lp, st):
        errs += _rotation_violations(state.rotation, state.graph.edges)
        lt = looptree_from_rotation(state.rotation, state.graph.root, state.graph.edges)
        used = set()
        for x, y in lt.edges:
            used.update((x, y))
        errs += lt.n_vertices != state.graph.n_edges
        errs += len(used) != state.graph.n_edges
        errs += not lt.is_connected()
    bad["looptree"] = errs
    total = sum(bad.values())
    return _result("counting_identities", total, 0, 0, total == 0, n, t0, "violations == 0",
                   " ".join(f"{k}:{v}" for k, v in bad.items()))


# ---------------------------------------------------------------- urns and Mittag-Leffler

@check("polya_dirichlet")
def polya_dirichlet(p, rng):
    t0 = time.perf_counter()
    n, reps = _i(p, "steps", 10**5), _i(p, "replicates", 1000)
    x = np.array([polya_urn([1.0, 1.0], 1.0, n, rng).proportions()[0] for _ in range(reps)])
    pval = sps.kstest(x, "uniform").pvalue
    mean = float(x.mean())
    ok = pval > 0.01 and abs(mean - 0.5) <= 0.01 * 0.5
    return _result("polya_dirichlet", mean, 0.5, 0.005, ok, reps, t0,
                   "KS p vs Uniform(0,1) > 0.01 and |mean - 0.5| <= 1% of 0.5",
                   f"ks_p={pval:.4g}", stderr=float(x.std(ddof=1) / math.sqrt(reps)))


@check("urn_eigenvector")
def urn_eigenvector(p, rng):
    t0 = time.perf_counter()
    alpha = _f(p, "alpha", 1.5)
    n, reps = _i(p, "steps", 10**5), _i(p, "replicates", 1000)
    matrix = [[2 * (alpha - 1), 2 - alpha], [alpha - 1, 1.0]]
    _, v = generalized_urn_limit(matrix)
    x = np.array([generalized_urn([alpha - 1, 0.0], matrix, n, rng).proportions()[0] for _ in range(reps)])
    res = _rel_check("urn_eigenvector", float(x.mean()), alpha - 1, 0.01, reps, t0,
                     f"left eigenvector {v[0]:.6g}", float(x.std(ddof=1) / math.sqrt(reps)))
    return res


@check("crp_moments")
def crp_moments(p, rng):
    t0 = time.perf_counter()
    alpha, theta = _f(p, "alpha", 0.5), _f(p, "theta", 0.5)
    n, reps = _i(p, "n", 10**4), _i(p, "replicates", 1000)
    w = np.array([crp_table_count(alpha, theta, n, rng) for _ in range(reps)]) / n ** alpha
    m1, m2 = float(w.mean()), float(np.mean(w ** 2))
    t1, t2 = ml_moment(alpha, theta, 1), ml_moment(alpha, theta, 2)
    ok = abs(m1 - t1) <= 0.05 * t1 and abs(m2 - t2) <= 0.07 * t2
    return _result("crp_moments", m1, t1, 0.05 * t1, ok, reps, t0,
                   "mean within 5% and second moment within 7% of the ML moments",
                   f"second_moment={m2:.5g} target={t2:.5g} tol={0.07 * t2:.4g}")


@check("pa_degree")
def pa_degree(p, rng):
    t0 = time.perf_counter()
    a = _f(p, "a", 1.0)
    n, reps = _i(p, "n", 10**5), _i(p, "replicates", 500)
    fit = FitnessSequence.constant(a)
    x = np.array([pa_grow(fit, n, rng).out_degrees()[0] for _ in range(reps)]) / math.sqrt(n)
    return _rel_check("pa_degree", float(x.mean()), math.sqrt(math.pi), 0.05, reps, t0,
                      stderr=float(x.std(ddof=1) / math.sqrt(reps)))


@check("mlmc_exponent")
def mlmc_exponent(p, rng):
    t0 = time.perf_counter()
    alpha, theta = _f(p, "alpha", 0.5), _f(p, "theta", 0.5)
    lo, hi = _i(p, "k_min", 100), _i(p, "k_max", 10**4)
    reps = _i(p, "replicates", 20)
    ks = np.unique(np.geomspace(lo, hi, _i(p, "points", 50)).astype(int))
    slopes = []
    for _ in range(reps):
        m = sample_mlmc(alpha, theta, hi, rng).values
        slopes.append(loglog_slope(ks, m[ks - 1], (lo, hi))[0])
    s = float(np.mean(slopes))
    return _result("mlmc_exponent", s, 1 - alpha, 0.05, abs(s - (1 - alpha)) <= 0.05, reps, t0,
                   "|slope - (1 - alpha)| <= 0.05", stderr=float(np.std(slopes, ddof=1) / math.sqrt(reps)))


@check("pa_height")
def pa_height(p, rng):
    t0 = time.perf_counter()
    n, reps = _i(p, "n", 10**5), _i(p, "replicates", 100)
    bound = _f(p, "bound", 12.0)
    fit = FitnessSequence.constant(_f(p, "a", 1.0))
    h = max(pa_grow(fit, n, rng).height() for _ in range(reps)) / math.log(n)
    return _result("pa_height", h, bound, 0.0, h < bound, reps, t0, f"max height / ln n < {bound:g}")


@check("remy_diameter_exponent")
def remy_diameter_exponent(p, rng):
    t0 = time.perf_counter()
    lo, hi = _i(p, "n_min", 10**3), _i(p, "n_max", 10**5)
    reps = _i(p, "replicates", 50)
    ns = np.unique(np.geomspace(lo, hi, _i(p, "points", 11)).astype(int))
    d = np.mean([remy_diameters(ns, rng) for _ in range(reps)], axis=0)
    s, se = loglog_slope(ns, d, (lo, hi))
    return _result("remy_diameter_exponent", s, 0.5, 0.05, abs(s - 0.5) <= 0.05, reps, t0,
                   "|slope - 1/2| <= 0.05", stderr=se)


@check("marchal_density")
def marchal_density(p, rng):
    from ..growth import alphagamma_counts, marchal_counts
    t0 = time.perf_counter()
    n, reps = _i(p, "n", 10**5), _i(p, "replicates", 100)
    alpha = _f(p, "alpha", 1.5)
    v = np.array([marchal_counts(MultiGraph.single_edge(), alpha, n, rng)[0] for _ in range(reps)]) / n
    ag, gam = _f(p, "ag_alpha", 0.5), _f(p, "ag_gamma", 0.3)
    w = np.array([alphagamma_counts(ag, gam, n, rng)[1] for _ in range(reps)]) / n
    t1, t2 = alpha, (1 - ag) / (1 - gam)
    ok = abs(v.mean() - t1) <= 0.02 * t1 and abs(w.mean() - t2) <= 0.02 * t2
    return _result("marchal_density", float(v.mean()), t1, 0.02 * t1, ok, reps, t0,
                   "|V|/n within 2% of alpha; alpha-gamma edge weight / n within 2% of (1-alpha)/(1-gamma)",
                   f"alphagamma_weight_per_n={w.mean():.5g} target={t2:.5g}")


# ---------------------------------------------------------------- gluing checks

def random_finite_decoration(rng, n_blocks=20, max_points=6):
    """Random recursive plane tree of blocks; each block is a random Euclidean
    point cloud (rescaled) with the root first and attach points among the others."""
    parents = [-1] + [int(rng.integers(k)) for k in range(1, n_blocks)]
    tree = PlaneTree.from_parents(parents)
    addrs = list(tree.order)
    deg = {u: tree.out_degree(u) for u in addrs}
    blocks = {}
    for u in addrs:
        m = int(rng.integers(1, max_points + 1)) + 1
        x = rng.random((m, 2)) * rng.exponential()
        d = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(-1))
        attach = rng.integers(0, m, size=deg[u])
        blocks[u] = Block(matrix=d, root=0, attach=attach, validate=False)
    return Decoration(blocks), tree


def random_truncation(tree, rng):
    keep = [u for u in tree if rng.random() < 0.5]
    return plane_tree_closure(keep)


@check("truncation_gap")
def truncation_gap(p, rng):
    """Every point of the full gluing lies within the certified gap of the truncation,
    and distances between truncated points are unchanged."""
    t0 = time.perf_counter()
    reps = _i(p, "decorations", 100)
    worst_ratio, violations = 0.0, 0
    for _ in range(reps):
        dec, tree = random_finite_decoration(rng, _i(p, "blocks", 20))
        theta = random_truncation(tree, rng)
        bound = truncation_gap_bound(dec, theta)
        full = GluedSpace(dec)
        pts = dec.points()
        inside = [q for q in pts if q.address in theta]
        d = full.distances(pts)
        idx = [i for i, q in enumerate(pts) if q.address in theta]
        gap = float(d[:, idx].min(axis=1).max())
        trunc = GluedSpace(dec, theta).distances(inside)
        violations += gap > bound
        violations += not np.array_equal(trunc, d[np.ix_(idx, idx)])
        if bound > 0:
            worst_ratio = max(worst_ratio, gap / bound)
    return _result("truncation_gap", violations, 0, 0, violations == 0, reps, t0,
                   "gap <= bound and truncated distances unchanged on every decoration",
                   f"max gap/bound={worst_ratio:.4g}")


@check("measure_convergence")
def measure_convergence(p, rng):
    t0 = time.perf_counter()
    alpha, theta_p = _f(p, "alpha", 0.5), _f(p, "theta", 0.5)
    n, reps = _i(p, "n", 10**5), _i(p, "replicates", 100)
    thr = _f(p, "threshold", 0.05)
    b = (1 - alpha) / alpha
    a = theta_p / alpha
    fit = FitnessSequence.constant(a, b)
    theta = PlaneTree.from_addresses([ROOT, (1,), (2,), (3,), (1, 1), (1, 2), (2, 1)])
    worst = 0.0
    for _ in range(reps):
        w = sample_mlmc(alpha, theta_p, n, rng).increments
        tree = wrt_grow(w, n, rng)
        nu, mu, eta = uniform_measure(tree), weight_measure(tree, w), degree_measure(tree, fit)
        worst = max(worst, measure_distance(nu, mu, theta), measure_distance(nu, eta, theta),
                    measure_distance(mu, eta, theta))
    return _result("measure_convergence", worst, thr, 0.0, worst < thr, reps, t0,
                   f"max pairwise measure distance on theta < {thr:g}")


# ---------------------------------------------------------------- limit constructions

@check("cross_construction")
def cross_construction(p, rng):
    """Root-to-mu-point distances: segments with MLMC(1/3,1/3) weights vs
    Brownian blocks scaled by w^(1/2) with MLMC(2/3,1/3) weights."""
    t0 = time.perf_counter()
    n, size = _i(p, "n", 10**5), _i(p, "samples", 1000)
    m = _i(p, "brownian_leaves", 1000)
    a = root_distance_samples(size, n, (1 / 3, 1 / 3), 1.0, segment_depths, rng)
    b = root_distance_samples(size, n, (2 / 3, 1 / 3), 0.5,
                              lambda k, r: remy_leaf_depths(m, k, r), rng)
    pval = sps.ks_2samp(a, b).pvalue
    return _result("cross_construction", pval, 0.01, 0.0, pval > 0.01, size, t0, "two-sample KS p > 0.01",
                   f"means {a.mean():.4g} / {b.mean():.4g}")


@check("dimension")
def dimension(p, rng):
    t0 = time.perf_counter()
    floor = _f(p, "diameter_floor", 0.003)
    centres = _i(p, "centres", 200)
    law = unit_segment_law(lambda r: r.dirichlet(np.ones(4)))
    spec = SelfSimilarSpec(0.5, law, depth_cap=80, diameter_floor=floor, diameter_bound=1.0)
    ss = self_similar_sample(spec, rng)
    r1 = np.geomspace(_f(p, "ss_r_min", 0.2), _f(p, "ss_r_max", 1.0), 8)
    e1 = leaf_dimension_estimate(ss.space, ss.measure, centres, r1, rng,
                                 resolution=floor / (1 - 2 ** -0.5))
    st = lpam_grow(0.0, _i(p, "lpam_n", 10**5), rng, mode="decorated")
    dec, mu = uniform_point_measure(st.loop_decoration()[0])
    r2 = np.geomspace(_f(p, "lpam_r_min", 8), _f(p, "lpam_r_max", 128), 9)
    e2 = leaf_dimension_estimate(GluedSpace(dec), mu, centres, r2, rng)
    ok = abs(e1 - 2) <= 0.4 and abs(e2 - 2) <= 0.4
    return _result("dimension", float(e1), 2.0, 0.4, ok, centres, t0,
                   "both estimates within 0.4 of 2",
                   f"self_similar={float(e1):.4g} lpam={float(e2):.4g}", stderr=e1.stderr)


@check("remy_height_tail")
def remy_height_tail(p, rng):
    t0 = time.perf_counter()
    n, runs = _i(p, "n", 10**4), _i(p, "runs", 10**4)
    q = _f(p, "tail_from", 0.5)
    h = np.sort(np.array([remy_height_sup(n, rng) for _ in range(runs)]))
    xs = np.unique(h[int(q * runs):])
    surv = np.array([np.mean(h > x) for x in xs])
    keep = surv > 0
    xs, surv = xs[keep], surv[keep]
    fit = sps.linregress(xs ** 2, np.log(surv))
    r2 = fit.rvalue ** 2
    ok = fit.slope < 0 and r2 > 0.9
    return _result("remy_height_tail", fit.slope, None, None, ok, runs, t0,
                   "slope of log P(H > x) on x^2 < 0 and R^2 > 0.9", f"R2={r2:.4f} points={xs.size}")


# ---------------------------------------------------------------- suites

def read_suite(name_or_path):
    """(master seed, [(section, params)]) from a shipped suite name or an INI path."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if name_or_path.endswith(".ini"):
        with open(name_or_path) as fh:
            cp.read_file(fh)
    else:
        text = resources.files("pagraphs").joinpath("suites", f"{name_or_path}.ini").read_text()
        cp.read_string(text)
    seed = int(cp["suite"]["seed"]) if "suite" in cp else 0
    sections = [(s, dict(cp[s])) for s in cp.sections() if s != "suite"]
    for s, params in sections:
        if params.get("check") not in CHECKS:
            raise ParameterError(f"section [{s}] names unknown check {params.get('check')!r}")
    return seed, sections


def section_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def run_check(seed, index, section, params):
    res = CHECKS[params["check"]](params, section_rng(seed, index))
    res.name = f"{section} {res.name}"
    return res


def run_suite(name_or_path, seed=None, only=None, echo=print):
    """Run every check of a suite; ``seed`` overrides the suite's master seed."""
    master, sections = read_suite(name_or_path)
    seed = master if seed is None else seed
    report = StatReport([], {"suite": name_or_path, "seed": seed})
    for i, (section, params) in enumerate(sections):
        if only and section not in only:
            continue
        try:
            res = run_check(seed, i, section, params)
        except Exception as exc:             # noqa: BLE001 -- reported as a failing entry
            res = DiagnosticResult(section, None, passed=False, error=f"{type(exc).__name__}: {exc}")
        report.entries.append(res)
        if echo:
            echo(res.line())
    return report
