"""Uniform, weight and degree measures of a recursive tree with MLMC weights,
compared on a small plane tree as the tree grows."""
import numpy as np

from pagraphs.distributions import sample_mlmc
from pagraphs.glue import measure_distance
from pagraphs.growth import FitnessSequence, degree_measure, uniform_measure, weight_measure, wrt_grow
from pagraphs.ulam import ROOT, PlaneTree

rng = np.random.default_rng(5)
n = 10**5
w = sample_mlmc(0.5, 0.5, n, rng).increments
tree = wrt_grow(w, n, rng)
theta = PlaneTree.from_addresses([ROOT, (1,), (2,), (3,), (1, 1), (1, 2), (2, 1)])
fit = FitnessSequence.constant(1.0, 1.0)
for m in (100, 1000, 10**4, 10**5):
    nu, mu, eta = uniform_measure(tree, m), weight_measure(tree, w, m), degree_measure(tree, fit, m)
    print(f"{m:7d}  nu-mu {measure_distance(nu, mu, theta):.4f}  nu-eta {measure_distance(nu, eta, theta):.4f}"
          f"  mu-eta {measure_distance(mu, eta, theta):.4f}")
