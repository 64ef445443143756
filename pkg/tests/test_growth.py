import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from pagraphs.distributions import ml_moment, sample_mlmc
from pagraphs.errors import ModeError, ParameterError, ValidationError
from pagraphs.growth import (EDGE, VERTEX, FitnessSequence, MultiGraph, alphagamma_grow,
                             block_weight, degree_measure, edge_split_process, looptree,
                             lpam_first_degree, lpam_grow, marchal_grow, pa_grow, read_trace,
                             remy_generalized, remy_v2_decompose, standard_seeds, two_line_seeds,
                             uniform_measure, weight_measure, write_trace, wrt_grow)
from pagraphs.glue import measure_distance
from pagraphs.ulam import PlaneTree

from conftest import pooled_chi2

HARMONIC_99 = 5.17737751763962       # tests/oracles/growth_oracle.py


def gens(seed=1):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------- trees

def test_wrt_forced_shapes():
    t = wrt_grow([1.0] + [0.0] * 30, 31, gens())
    assert np.all(t.parents[1:] == 0)
    assert wrt_grow([0.3], 2, gens()).parents.tolist() == [-1, 0]
    with pytest.raises(ParameterError):
        wrt_grow([0.0, 1.0], 3, gens())


def test_random_recursive_tree_root_degree():
    rng = gens()
    deg = [wrt_grow(np.ones(100), 100, rng).out_degrees()[0] for _ in range(10**4)]
    assert abs(np.mean(deg) / HARMONIC_99 - 1) < 0.02


def test_pa_second_vertex_forced():
    rng = gens()
    for a in (-0.5, 0.0, 3.0):
        assert pa_grow(FitnessSequence.constant(a, 1.0), 2, rng).parents.tolist() == [-1, 0]


def test_pa_root_degree_scaling():
    rng = gens()
    fit = FitnessSequence.constant(1.0)
    w = [pa_grow(fit, 10**5, rng).out_degrees()[0] / np.sqrt(1e5) for _ in range(500)]
    assert abs(np.mean(w) / ml_moment(0.5, 0.5, 1) - 1) < 0.05


def test_pa_height_logarithmic():
    rng = gens()
    fit = FitnessSequence.constant(1.0)
    ratio = max(pa_grow(fit, 10**5, rng).height() / np.log(1e5) for _ in range(100))
    assert ratio < 12


def test_pa_and_wrt_with_mlmc_weights_agree_in_law():
    a, b, n, reps = 0.5, 1.0, 50, 10**5
    fit = FitnessSequence.constant(a, b)
    ones = np.ones(n)
    rng_pa, rng_wrt = gens(21), gens(22)
    x = [pa_grow(fit, n, rng_pa).subtree_sums(ones)[1] for _ in range(reps)]
    # the tree law only depends on weight ratios, so a coarse top marginal is enough
    y = [wrt_grow(sample_mlmc(1 / (b + 1), a / (b + 1), n, rng_wrt, resolution=1000).increments,
                  n, rng_wrt).subtree_sums(ones)[1] for _ in range(reps)]
    assert pooled_chi2(np.asarray(x, int), np.asarray(y, int)) > 0.01


def test_fitness_validation():
    FitnessSequence.constant(1.0).validate()
    with pytest.raises(ParameterError):
        FitnessSequence([-1.0, 1.0])
    with pytest.raises(ValidationError):
        FitnessSequence(lambda k: float(k), c=1.0).validate(n=1000)


def test_degree_measure_examples():
    t = wrt_grow([1.0], 1, gens())
    assert degree_measure(t, [0.5]).atoms == {(): 1.0}
    star = wrt_grow([1.0] + [0.0] * 20, 21, gens())
    eta = degree_measure(star, np.zeros(21))
    assert eta.mass(()) == 1.0
    with pytest.raises(ParameterError):
        degree_measure(star, np.r_[-2.0, np.zeros(20)])


@given(st.integers(1, 60), st.floats(-0.9, 3), st.floats(0, 3), st.integers(0, 2**32 - 1))
def test_measures_are_probabilities(n, a, b, seed):
    t = pa_grow(FitnessSequence.constant(a, b), n, gens(seed))
    bseq = np.r_[a, np.full(n - 1, b)]
    for m in (uniform_measure(t), weight_measure(t, np.r_[1.0, np.ones(n - 1)]), degree_measure(t, bseq)):
        assert m.total() == pytest.approx(1.0, abs=1e-12)
        assert all(v >= 0 for v in m.atoms.values())


def test_measures_merge_along_a_run():
    a, b = 1.0, 1.0
    rng = gens()
    m = sample_mlmc(1 / (b + 1), a / (b + 1), 10**4, rng).increments
    t = wrt_grow(m, 10**4, rng)
    theta = PlaneTree.from_addresses([(), (1,), (2,), (1, 1)])
    dist = [max(measure_distance(uniform_measure(t, k), weight_measure(t, m, k), theta),
                measure_distance(weight_measure(t, m, k), degree_measure(t, np.r_[a, np.full(k - 1, b)], k),
                                 theta)) for k in (100, 10**4)]
    assert dist[1] < dist[0]


# ---------------------------------------------------------------- edge splitting and Remy

def test_edge_split_examples():
    r = edge_split_process(MultiGraph.single_edge(), 1, gens())
    assert r.graph.n_edges == 2 and r.distinguished.tolist() == [2]
    assert sorted(r.graph.degrees().tolist()) == [1, 1, 2]
    r = edge_split_process(MultiGraph.star(3), 57, gens())
    assert r.graph.n_edges == 3 + 57 and r.path_lengths(3).sum() == 60


def test_edge_split_first_point_uniform():
    rng = gens()
    m = 10**4
    x = []
    for _ in range(1000):
        r = edge_split_process(MultiGraph.single_edge(), m, rng)
        x.append(r.graph.distances(indices=[0])[0, r.distinguished[0]] / m)
    assert stats.kstest(x, "uniform").pvalue > 0.01


def test_remy_counts():
    s = remy_generalized(standard_seeds(), 200, gens())
    assert s.graph.n_vertices == 400 and s.graph.n_edges == 399
    seeds = [MultiGraph.star(3), MultiGraph.path(2), MultiGraph.single_edge()]
    s = remy_generalized(seeds, 150, gens())
    a = [3, 2] + [1] * 148
    assert s.graph.n_edges == sum(a) + 149
    with pytest.raises(ValidationError):
        remy_generalized(MultiGraph(3, [(0, 1)]), 5, gens())
    with pytest.raises(ValidationError):
        remy_generalized(MultiGraph(1, []), 5, gens())


@pytest.mark.parametrize("seeds", [standard_seeds(), two_line_seeds(),
                                   [MultiGraph.star(3), MultiGraph.path(2), MultiGraph.single_edge()]])
def test_remy_dual_representation(seeds):
    s = remy_generalized(seeds, 500, gens(4))
    assert np.array_equal(s.decorated_distances(), s.direct_distances())


def test_remy_v2():
    s = remy_generalized(two_line_seeds(), 300, gens(5))
    v2 = remy_v2_decompose(s)
    assert np.array_equal(v2.decorated_distances(), s.direct_distances())
    out = v2.pa_tree().out_degrees()
    for k, blk in enumerate(v2.blocks):
        assert len(blk.edges) == 1 + 2 * out[k]
    with pytest.raises(ModeError):
        remy_v2_decompose(remy_generalized(standard_seeds(), 20, gens()))


# ---------------------------------------------------------------- Marchal

def element_weights(g, alpha):
    """Direct sum over elements: edges weigh alpha-1, vertices of degree d >= 3 weigh d-1-alpha."""
    deg = [0] * g.n_vertices
    for a, b in g.edges:
        deg[a] += 1
        deg[b] += 1
    return g.n_edges * (alpha - 1) + sum(d - 1 - alpha for d in deg if d >= 3)


def test_block_weight_examples():
    assert block_weight(MultiGraph.single_edge(), 1.5) == pytest.approx(0.5)
    tri = MultiGraph(3, [(0, 1), (1, 2), (2, 0)])
    assert block_weight(tri, 1.5) == pytest.approx(element_weights(tri, 1.5)) == pytest.approx(3 * 1.5 - 3)


@st.composite
def connected_multigraphs(draw):
    n = draw(st.integers(2, 8))
    edges = [(k, draw(st.integers(0, k - 1))) for k in range(1, n)]
    edges += draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=5))
    return MultiGraph(n, edges)


@given(connected_multigraphs(), st.floats(1.01, 1.99))
def test_block_weight_matches_element_sum(g, alpha):
    assert block_weight(g, alpha) == pytest.approx(element_weights(g, alpha), abs=1e-9)


def test_marchal_weight_and_dual_representation():
    alpha = 1.5
    seed = MultiGraph.star(3)
    s = marchal_grow(seed, alpha, 500, gens(6))
    P, Q = s.extra["weight_totals"][-1]
    assert P + Q * alpha == pytest.approx(block_weight(seed, alpha) + alpha * 499)
    assert P + Q * alpha == pytest.approx(element_weights(s.graph, alpha))
    assert np.array_equal(s.decorated_distances(), s.direct_distances())
    with pytest.raises(ParameterError):
        marchal_grow(seed, 2.0, 10, gens())


def test_marchal_vertex_density():
    s = marchal_grow(MultiGraph.single_edge(), 1.5, 10**5, gens(), mode="direct")
    assert abs(s.graph.n_vertices / 1e5 / 1.5 - 1) < 0.02


# ---------------------------------------------------------------- planar models

def test_looptree_examples():
    edge = PlaneTree.from_addresses([(), (1,)])
    lt = looptree(edge)
    assert lt.n_vertices == 1 and lt.edges == [(0, 0)]
    path = PlaneTree.from_addresses([(), (1,), (1, 1)])
    lt = looptree(path)
    assert lt.n_vertices == 2
    assert sorted(tuple(sorted(e)) for e in lt.edges) == [(0, 1), (0, 1), (1, 1)]


@given(st.lists(st.integers(0, 10**6), min_size=1, max_size=30))
def test_looptree_edge_count(choices):
    parents = [-1] + [c % (k + 1) for k, c in enumerate(choices)]
    t = PlaneTree.from_parents(parents)
    deg = [t.out_degree(u) + (1 if u else 0) for u in t]
    assert looptree(t).n_edges == sum(d for u, d in zip(t, deg) if u)


def test_alphagamma_identities_and_dual():
    a, g = 0.5, 0.3
    s = alphagamma_grow(a, g, 500, gens(7))
    assert np.allclose(s.extra["leaf_edge_weight"], (1 - a) * np.arange(1, 501))
    assert s.looptree().n_vertices == s.graph.n_edges
    assert np.array_equal(s.decorated_distances(), s.direct_distances())
    assert np.array_equal(s.decorated_loop_distances(), s.direct_loop_distances())
    with pytest.raises(ParameterError):
        alphagamma_grow(0.5, 0.6, 10, gens())


def test_alphagamma_edge_weight_density():
    a, g = 0.5, 0.3
    s = alphagamma_grow(a, g, 10**5, gens(), mode="direct")
    assert abs(s.extra["edge_weight"][-1] / 1e5 / ((1 - a) / (1 - g)) - 1) < 0.02


def test_alphagamma_boundary_replays_marchal():
    a = 0.6
    ag = alphagamma_grow(a, 1 - a, 400, gens(8), mode="direct")
    mc = marchal_grow(MultiGraph.single_edge(), 1 / a, 400, gens(8), mode="direct")
    assert np.array_equal(ag.trace["kind"], mc.trace["kind"])
    assert np.array_equal(ag.trace["element"], mc.trace["element"])
    assert sorted(ag.graph.edges) == sorted(mc.graph.edges)


def test_lpam():
    s = lpam_grow(0.0, 1, gens())
    assert s.graph.n_vertices == 2 and s.graph.edges == [(0, 1)]
    delta = 0.7
    s = lpam_grow(delta, 400, gens(9))
    deg = s.extra["degrees"]
    assert deg[1:].sum() + 400 * delta == pytest.approx(2 * 400 - 1 + 400 * delta)
    assert np.array_equal(s.decorated_loop_distances(), s.direct_loop_distances())
    with pytest.raises(ParameterError):
        lpam_grow(-1.0, 10, gens())


def test_lpam_first_degree_scaling():
    rng = gens()
    w = [lpam_first_degree(0.0, 10**5, rng) / np.sqrt(1e5) for _ in range(500)]
    assert abs(np.mean(w) / ml_moment(0.5, 0.5, 1) - 1) < 0.05


def test_lpam_first_degree_matches_full_run():
    for seed in range(5):
        assert lpam_first_degree(0.3, 300, gens(seed)) == lpam_grow(0.3, 300, gens(seed)).extra["degrees"][1]


# ---------------------------------------------------------------- traces

def test_trace_roundtrip(tmp_path):
    s = alphagamma_grow(0.5, 0.3, 100, gens())
    p = tmp_path / "trace.csv"
    write_trace(s.trace, str(p))
    assert np.array_equal(read_trace(str(p)), s.trace)
    assert set(np.unique(s.trace["kind"])) <= {EDGE, VERTEX}


def test_modes():
    s = remy_generalized(standard_seeds(), 20, gens(), mode="direct")
    with pytest.raises(ModeError):
        s.decoration()
    with pytest.raises(ModeError):
        remy_generalized(standard_seeds(), 20, gens(), mode="sideways")
