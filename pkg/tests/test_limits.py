import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from pagraphs.errors import ParameterError, ResolutionError, ValidationError
from pagraphs.glue import Block, Decoration, GluedSpace, MeasureOnUlam, Point
from pagraphs.growth import FitnessSequence, MultiGraph, pa_grow, remy_generalized, standard_seeds
from pagraphs.growth.trees import split_proportions
from pagraphs.limits import (ROOTED_EDGE, IterativeGluingSpec, SelfSimilarSpec, ass_from_iterative,
                             brownian_block_approx, deterministic_sticks, iterative_gluing,
                             leaf_dimension_estimate, line_breaking, ray_root_distance,
                             remy_leaf_depths, root_distance_samples, sample_block_CG,
                             sample_block_Calpha, sample_block_Clen, sample_blocks_SB_joint,
                             sample_y_sequence, segment_depths, self_similar_sample,
                             unit_segment_law, unit_segment_sampler)
from pagraphs.ulam import ROOT

# frozen from tests/oracles/limits_oracle.py
SQRT_PI = 1.77245385090552
ROOTED_EDGE_MEAN_13 = 0.3             # alpha = 1.3
Y1_MEAN = 0.375                       # alpha = 0.5, gamma = 0.3
MLMC_MEAN_5 = 4.36189814871279        # E[M_5], MLMC(1/2, 1/2)
FIRST_STICK = {                       # (mean, second moment) of Beta(1-alpha, theta+alpha)
    "root a=1 b=1": (1 / 3, 0.2),
    "root a=0.5 b=1": (0.4, 0.26666666666573036),
    "generic b=1": (1 / 3, 0.2),
}


def root_row(blk):
    return np.array([blk.distance(blk.root, x) for x in blk.attach])


def assert_metric(d, tol=1e-12):
    d = np.asarray(d)
    assert np.allclose(d, d.T, atol=tol) and np.all(np.diag(d) == 0) and np.all(d >= -tol)
    assert np.all(d[:, None, :] <= d[:, :, None] + d[None, :, :] + tol)


# ---------------------------------------------------------------- metric-graph blocks

def test_cg_single_edge_is_unit_segment(rng):
    s = sample_block_CG(MultiGraph.single_edge(), 500, rng)
    assert s.provenance["lengths"].tolist() == [1.0]
    x = root_row(s.block)
    assert stats.kstest(x, "uniform").pvalue > 0.01
    d = s.block.full_matrix()
    assert np.allclose(d[1:, 1:], np.abs(x[:, None] - x[None, :]), atol=1e-12)


@pytest.mark.parametrize("seed", [MultiGraph.single_edge(), MultiGraph.star(3), MultiGraph.path(2),
                                  MultiGraph.self_loop()])
def test_cg_total_length_one(seed, rng):
    s = sample_block_CG(seed, 30, rng)
    assert s.provenance["lengths"].sum() == pytest.approx(1.0, abs=1e-12)
    assert_metric(s.block.full_matrix())


def test_cg_three_edge_length_means(rng):
    star = MultiGraph.star(3)
    L = np.array([sample_block_CG(star, 0, rng).provenance["lengths"] for _ in range(10**5)])
    assert np.all(np.abs(L.mean(axis=0) - 1 / 3) <= 0.01 / 3)


def test_calpha_single_edge_total_length(rng):
    tot = []
    for _ in range(1000):
        s = sample_block_Calpha(MultiGraph.single_edge(), 1.5, 5, None, rng)
        p = s.provenance
        assert p["vertex_atoms"].size == 0 and p["edge_mass"] == 1.0
        assert p["atom_total"] + p["residual_stick_mass"] == pytest.approx(1.0, abs=1e-9)
        tot.append(p["lengths"].sum())
    assert abs(np.mean(tot) - SQRT_PI) <= 0.05 * SQRT_PI


def test_calpha_heavy_vertex_atoms(rng):
    s = sample_block_Calpha(MultiGraph.star(3), 1.5, 200, 2000, rng)
    p = s.provenance
    assert p["heavy_vertices"].size == 1
    assert p["edge_mass"] + p["vertex_atoms"].sum() == pytest.approx(1.0)
    assert_metric(s.block.full_matrix())


def test_calpha_parameter_range(rng):
    for alpha in (1.0, 2.0, 0.5):
        with pytest.raises(ParameterError):
            sample_block_Calpha(MultiGraph.single_edge(), alpha, 1, 10, rng)


def test_clen_rooted_edge_mean(rng):
    L = np.array([sample_block_Clen(ROOTED_EDGE, 1.3, 0, rng).provenance["lengths"][0]
                  for _ in range(20000)])
    assert abs(L.mean() - ROOTED_EDGE_MEAN_13) <= 0.01


def test_clen_rooted_edge_points(rng):
    s = sample_block_Clen(ROOTED_EDGE, 1.5, 400, rng)
    p = s.provenance
    assert p["nu_total"] == pytest.approx(1.0, abs=1e-12)
    x = root_row(s.block)
    # points are either the root atom or uniform on the edge
    zero = np.isclose(x, 0.0)
    assert abs(zero.mean() - p["vertex_atoms"][0]) < 0.1
    assert np.all(x <= p["lengths"][0] + 1e-12)


def test_clen_single_edge_seed_is_unit_segment(rng):
    s = sample_block_Clen(MultiGraph.single_edge(), 1.5, 500, rng)
    assert s.provenance["lengths"].tolist() == [1.0]
    assert s.provenance["nu_total"] == 1.0
    assert stats.kstest(root_row(s.block), "uniform").pvalue > 0.01


def test_clen_parameter_range(rng):
    with pytest.raises(ParameterError):
        sample_block_Clen(ROOTED_EDGE, 2.5, 1, rng)
    with pytest.raises(ParameterError):
        sample_block_Clen("loop", 1.5, 1, rng)


# ---------------------------------------------------------------- segment / string of circles

def test_sb_degenerate_case_is_shared_unit_segment(rng):
    s, b = sample_blocks_SB_joint(0.4, 0.4, 50, None, rng)
    assert np.array_equal(s.block.full_matrix(), b.block.full_matrix())
    y = s.provenance["Y"]
    assert np.allclose(root_row(s.block), y)
    assert np.all((y >= 0) & (y <= 1))


def test_y1_mean(rng):
    y1 = np.array([sample_y_sequence(0.5, 0.3, 1, rng)[0] for _ in range(20000)])
    assert abs(y1.mean() - Y1_MEAN) <= 0.01


@given(st.integers(0, 2**32 - 1))
def test_y_sequence_stays_in_unit_interval(seed):
    y = sample_y_sequence(0.6, 0.2, 200, np.random.default_rng(seed))
    assert np.all((y >= 0) & (y <= 1))
    top = np.maximum.accumulate(y)
    assert np.all(top[1:] >= top[:-1])


def test_sb_joint_coupling_and_geometry(rng):
    for _ in range(5):
        s, b = sample_blocks_SB_joint(0.5, 0.3, 40, 5000, rng)
        ps, pb = s.provenance, b.provenance
        assert np.array_equal(np.unique(ps["marked_coordinates"]), np.unique(pb["circle_coordinates"]))
        assert pb["total_circumference"] + pb["residual_stick_mass"] == pytest.approx(1.0, abs=1e-12)
        # segment: S times the marked coordinates
        assert np.allclose(root_row(s.block), ps["diversity"] * ps["marked_coordinates"], atol=1e-12)
        assert_metric(s.block.full_matrix())
        assert_metric(b.block.full_matrix(), tol=1e-9)
        # points on one circle are at most half its circumference apart
        labels = ps["labels"]
        d = b.block.full_matrix()[1:, 1:]
        for lab in np.unique(labels):
            idx = np.nonzero(labels == lab)[0]
            assert d[np.ix_(idx, idx)].max() <= 0.5 + 1e-12


def test_sb_parameter_range(rng):
    for a, g in ((0.3, 0.5), (1.0, 0.5), (0.5, 0.0)):
        with pytest.raises(ParameterError):
            sample_blocks_SB_joint(a, g, 1, 10, rng)


# ---------------------------------------------------------------- Brownian block approximation

def test_brownian_single_leaf(rng):
    s = brownian_block_approx(1, rng, min_leaves=1)
    assert s.block.distance(s.block.root, s.block.attach[0]) == 1.0
    assert s.provenance["approximate"] and s.provenance["resolution"] == 1


def test_brownian_resolution_error(rng):
    with pytest.raises(ResolutionError):
        brownian_block_approx(50, rng)


def test_brownian_block_shape(rng):
    s = brownian_block_approx(300, rng)
    d = s.block.full_matrix()
    assert d.shape == (301, 301) and s.scale == 300 ** -0.5
    # leaf-to-leaf distances are whole numbers of scaled edges, at least two
    off = d[1:, 1:][~np.eye(300, dtype=bool)] * np.sqrt(300)
    assert np.allclose(off, np.round(off)) and off.min() >= 2 - 1e-9
    big = brownian_block_approx(3000, rng)
    assert big.block.kind == "graph" and len(big.block.attach) == 3000


def test_brownian_self_consistency(rng):
    def depths(n):
        return np.concatenate([remy_leaf_depths(10**4, 500, rng) for _ in range(n // 500)])
    assert stats.wasserstein_distance(depths(4000), depths(4000)) < 0.05


# ---------------------------------------------------------------- line breaking and iterative gluing

def test_line_breaking_single_segment(rng):
    sp = line_breaking(FitnessSequence.constant(1.0), standard_seeds(), 1, rng, n_marked=3)
    assert sp.total_length == pytest.approx(sp.chain[0], abs=1e-12)
    blk = sp.decoration.block(ROOT)
    assert blk.diameter() == pytest.approx(sp.chain[0])
    for p in sp.marked:
        assert 0 <= sp.root_distance(p) <= sp.chain[0] + 1e-12


@pytest.mark.parametrize("seeds,fit", [(standard_seeds(), FitnessSequence.constant(1.0)),
                                       (lambda k: MultiGraph.single_edge() if k == 1 else MultiGraph.path(2),
                                        FitnessSequence.constant(1.0, 2.0))])
def test_line_breaking_total_length(seeds, fit, rng):
    sp = line_breaking(fit, seeds, 60, rng)
    assert sp.total_length == pytest.approx(sp.chain[-1], rel=1e-12)
    edges = sum(w for u in sp.decoration.addresses() for _, _, w in sp.decoration.block(u).edges)
    assert edges == pytest.approx(sp.chain[-1], rel=1e-12)


def test_line_breaking_mean_length(rng):
    M = [line_breaking(FitnessSequence.constant(1.0), standard_seeds(), 5, rng).total_length
         for _ in range(4000)]
    assert abs(np.mean(M) / MLMC_MEAN_5 - 1) <= 0.05


def test_line_breaking_errors(rng):
    with pytest.raises(ValidationError):
        line_breaking(FitnessSequence.constant(1.0), MultiGraph.path(2), 3, rng)
    with pytest.raises(ParameterError):
        line_breaking(FitnessSequence([1.0, 1.0, 2.0, 1.0]),
                      lambda k: MultiGraph.path(2) if k == 3 else MultiGraph.single_edge(), 4, rng)


def test_line_breaking_explicit_chain(rng):
    chain = np.array([1.0, 1.5, 3.0])
    sp = line_breaking(FitnessSequence([1.0, 1.0, 2.0, 1.0]),
                       lambda k: MultiGraph.path(2) if k == 3 else MultiGraph.single_edge(), 3, rng,
                       chain=chain)
    assert sp.total_length == pytest.approx(3.0)
    assert [x.sum() for x in sp.piece_lengths] == pytest.approx([1.0, 0.5, 1.5])


def test_iterative_single_block(rng):
    res = iterative_gluing(IterativeGluingSpec(1, unit_segment_sampler, weights=[2.0], extra_points=2), rng)
    dec, space, mu = res
    assert list(dec.addresses()) == [ROOT]
    assert mu.total() == pytest.approx(1.0)
    assert len(res.marked) == 2


def test_iterative_zero_scalings(rng):
    spec = IterativeGluingSpec(30, unit_segment_sampler, mlmc=(0.5, 0.5), scalings=np.zeros(30),
                               extra_points=1)
    res = iterative_gluing(spec, rng)
    assert np.all(res.space.distances(res.marked) == 0.0)


def test_iterative_errors(rng):
    with pytest.raises(ParameterError):
        iterative_gluing(IterativeGluingSpec(3, unit_segment_sampler, weights=[0.0, 1.0, 1.0]), rng)
    with pytest.raises(ParameterError):
        iterative_gluing(IterativeGluingSpec(3, unit_segment_sampler), rng)
    with pytest.raises(ParameterError):
        iterative_gluing(IterativeGluingSpec(0, unit_segment_sampler, weights=[1.0]), rng)


def test_iterative_matches_line_breaking(rng):
    n, reps = 100, 1000
    a = np.empty(reps)
    for r in range(reps):
        res = iterative_gluing(IterativeGluingSpec(n, unit_segment_sampler, mlmc=(0.5, 0.5),
                                                   extra_points=1), rng)
        w = res.weights
        k = rng.choice(n, p=w / w.sum())
        a[r] = res.space.root_distance(res.marked[k])
    b = np.empty(reps)
    for r in range(reps):
        sp = line_breaking(FitnessSequence.constant(1.0), standard_seeds(), n, rng, n_marked=1)
        b[r] = sp.root_distance(sp.marked[0])
    assert stats.ks_2samp(a, b).pvalue > 0.01


def test_lazy_root_distance_matches_full_gluing(rng):
    # the lazy sampler and the materialized gluing share one law
    n, reps = 50, 1000
    a = root_distance_samples(reps, n, (0.5, 0.5), 1.0, segment_depths, rng)
    b = np.empty(reps)
    for r in range(reps):
        res = iterative_gluing(IterativeGluingSpec(n, unit_segment_sampler, mlmc=(0.5, 0.5),
                                                   extra_points=1), rng)
        w = res.weights
        b[r] = res.space.root_distance(res.marked[rng.choice(n, p=w / w.sum())])
    assert stats.ks_2samp(a, b).pvalue > 0.01


# ---------------------------------------------------------------- self-similar decorations

def test_self_similar_refuses_noncontracting(rng):
    spec = SelfSimilarSpec(1.0, unit_segment_law(deterministic_sticks([1.0, 0.0])))
    with pytest.raises(ParameterError, match="contraction"):
        self_similar_sample(spec, rng)


def test_self_similar_binary_bounds(rng):
    spec = SelfSimilarSpec(2.0, unit_segment_law(deterministic_sticks([0.5, 0.5])), depth_cap=10,
                           diameter_floor=0.0, diameter_bound=1.0, stick_bound=0.5)
    for _ in range(5):
        res = self_similar_sample(spec, rng)
        d = res.space.distances([Point(u, i) for u in res.decoration.addresses()
                                 for i in range(res.decoration.block(u).n_points)])
        assert d[0].max() <= 4 / 3 + 1e-12
        assert d.max() <= 8 / 3 + 1e-12
        assert res.gap_bound == pytest.approx(4 ** -11 / (1 - 0.25))  # first pruned depth is 11


def test_self_similar_measure_multiplies(rng):
    law = unit_segment_law(lambda r: r.dirichlet(np.ones(3)))
    spec = SelfSimilarSpec(0.5, law, depth_cap=6, diameter_floor=0.01, diameter_bound=1.0)
    res = self_similar_sample(spec, rng)
    mu = res.measure
    assert mu.total() == pytest.approx(1.0)
    for u in res.decoration.addresses():
        for i, p in enumerate(res.sticks[u], start=1):
            child = u + (i,)
            if child in res.sticks:
                assert mu.subtree_mass(child) == mu.subtree_mass(u) * p


def test_self_similar_truncation_gap_shrinks(rng):
    law = unit_segment_law(lambda r: r.dirichlet(np.ones(4)))
    gaps = []
    for floor in (0.1, 0.03, 0.01):
        spec = SelfSimilarSpec(0.5, law, depth_cap=60, diameter_floor=floor, diameter_bound=1.0)
        res = self_similar_sample(spec, np.random.default_rng(3))
        gaps.append(res.lp_gap_bound)
    assert gaps[0] > gaps[1] > gaps[2] > 0


def test_ass_parameters():
    seg = lambda n, r: unit_segment_sampler(None, n, r)
    spec = ass_from_iterative(1.0, 1.0, 1.0, seg)
    assert spec.beta == 0.5
    spec = ass_from_iterative(3.0, 2.0, 0.5, seg)
    assert spec.beta == 0.125
    for args in ((1.0, -1.0, 1.0), (0.0, 1.0, 1.0), (1.0, 1.0, 0.0)):
        with pytest.raises(ParameterError):
            ass_from_iterative(*args, seg)


def test_ass_generic_first_stick_mean(rng):
    spec = ass_from_iterative(1.0, 0.5, 1.0, lambda n, r: unit_segment_sampler(None, n, r), n_sticks=50)
    p1 = np.array([spec.law.sticks(rng).fractions[0] for _ in range(20000)])
    assert abs(p1.mean() - 1 / 3) <= 0.01
    root = np.array([spec.root_law.sticks(rng).fractions[0] for _ in range(20000)])
    assert abs(root.mean() - FIRST_STICK["root a=0.5 b=1"][0]) <= 0.01


def test_ass_matches_iterative_gluing(rng):
    spec = ass_from_iterative(1.0, 1.0, 1.0, lambda n, r: unit_segment_sampler(None, n, r), n_sticks=10**4)
    a = np.array([ray_root_distance(spec, rng, tolerance=1e-3) for _ in range(1000)])
    b = root_distance_samples(1000, 10**4, (0.5, 0.5), 1.0, segment_depths, rng)
    assert stats.ks_2samp(a, b).pvalue > 0.01


# ---------------------------------------------------------------- dimension

def test_dimension_of_segment(rng):
    k = 2001
    blk = Block(k, 0, (), np.ones(k), edges=[(i, i + 1, 1.0 / (k - 1)) for i in range(k - 1)],
                validate=False)
    dec = Decoration({ROOT: blk})
    est = leaf_dimension_estimate(GluedSpace(dec), MeasureOnUlam({ROOT: 1.0}), 200,
                                  np.geomspace(0.01, 0.2, 8), rng)
    assert abs(est - 1.0) <= 0.3


def test_dimension_resolution_window(rng):
    blk = Block(11, 0, (), np.ones(11), edges=[(i, i + 1, 0.1) for i in range(10)], validate=False)
    space, mu = GluedSpace(Decoration({ROOT: blk})), MeasureOnUlam({ROOT: 1.0})
    with pytest.raises(ResolutionError):
        leaf_dimension_estimate(space, mu, 10, [0.05, 0.2], rng, resolution=0.05)
    with pytest.raises(ResolutionError):
        leaf_dimension_estimate(space, mu, 10, [0.2, 0.9], rng)


# ---------------------------------------------------------------- split proportions of PA trees

def first_child_fractions(a, b, vertex, n, reps, rng):
    fit = FitnessSequence.constant(a, b)
    out = []
    for _ in range(reps):
        t = pa_grow(fit, n, rng)
        p = split_proportions(t, np.ones(n), parent=vertex)
        out.append(p[0] if p.size else 0.0)
    return np.array(out)


@pytest.mark.parametrize("a,b,vertex,key", [(1.0, 1.0, 0, "root a=1 b=1"), (0.5, 1.0, 0, "root a=0.5 b=1"),
                                            (1.0, 1.0, 1, "generic b=1")])
def test_pa_split_proportions_match_gem(a, b, vertex, key, rng):
    p = first_child_fractions(a, b, vertex, 10**4, 10**4, rng)
    m1, m2 = FIRST_STICK[key]
    assert abs(p.mean() - m1) <= 0.05 * m1
    assert abs((p ** 2).mean() - m2) <= 0.05 * m2


# ---------------------------------------------------------------- block stabilization under growth

STAB_SEEDS = range(10)


@pytest.fixture(scope="module")
def remy_block_diameters():
    """Rescaled diameters of the first 10 blocks at n = 10^4 and 10^5, same seed."""
    small, large = [], []
    for seed in STAB_SEEDS:
        out = []
        for n in (10**4, 10**5):
            st_ = remy_generalized(standard_seeds(), n, np.random.default_rng(seed), mode="decorated")
            out.append([st_.blocks[k].to_block().diameter() * n ** -0.5 for k in range(10)])
        small.append(out[0])
        large.append(out[1])
    return np.array(small), np.array(large)


def test_remy_block_diameters_stabilize_in_mean(remy_block_diameters):
    small, large = remy_block_diameters
    assert abs(large.mean() / small.mean() - 1) <= 0.05
    assert np.all(np.abs(large.mean(axis=0) / small.mean(axis=0) - 1) <= 0.15)


@pytest.mark.xfail(strict=True, reason="per-block diameters still move by about 8% between 10^4 and "
                                       "10^5 steps; see the decision notes")
def test_remy_block_diameters_stabilize_per_block(remy_block_diameters):
    small, large = remy_block_diameters
    assert np.all(np.abs(large[0] / small[0] - 1) <= 0.05)
