"""Root-to-random-point distances in two iterative constructions that share a
limit: unit segments on MLMC(1/3,1/3) weights, and Remy-approximated Brownian
blocks scaled by w^(1/2) on MLMC(2/3,1/3) weights.  Writes both samples as CSV."""
import csv
import sys

import numpy as np
from scipy import stats

from pagraphs.limits import remy_leaf_depths, root_distance_samples, segment_depths

rng = np.random.default_rng(3)
n, size = 10**4, 500
a = root_distance_samples(size, n, (1 / 3, 1 / 3), 1.0, segment_depths, rng)
b = root_distance_samples(size, n, (2 / 3, 1 / 3), 0.5, lambda k, r: remy_leaf_depths(1000, k, r), rng)
print(f"means {a.mean():.4f} / {b.mean():.4f}, KS p = {stats.ks_2samp(a, b).pvalue:.3f}", file=sys.stderr)
w = csv.writer(sys.stdout)
w.writerow(("segments", "brownian"))
w.writerows(zip(a, b))
