"""Diameter of the standard Remy tree along one run, with the fitted log-log slope."""
import numpy as np

from pagraphs.growth import remy_diameters
from pagraphs.harness.stats import loglog_slope

rng = np.random.default_rng(1)
ns = np.unique(np.geomspace(100, 10**5, 16).astype(int))
runs = np.array([remy_diameters(ns, rng) for _ in range(20)], dtype=float)
mean = runs.mean(axis=0)
for n, d in zip(ns, mean):
    print(f"{n:7d}  {d:9.2f}  {d / np.sqrt(n):.3f}")
slope, err = loglog_slope(ns, mean, min_points=5)
print(f"slope {slope:.3f} +/- {err:.3f}")
