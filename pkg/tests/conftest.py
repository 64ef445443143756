import numpy as np
import pytest
from hypothesis import settings

import pagraphs.ulam

# every PlaneTree built during the tests is checked for prefix closure and contiguity
pagraphs.ulam.VALIDATE_TREES = True

settings.register_profile("pagraphs", max_examples=40, deadline=None)
settings.load_profile("pagraphs")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pooled_chi2(a, b, min_count=5):
    """Two-sample chi-square on integer samples, tail bins pooled until every
    pooled bin holds at least ``min_count`` observations in the pooled sample."""
    from scipy.stats import chi2_contingency
    a, b = np.asarray(a), np.asarray(b)
    values = np.union1d(a, b)
    ca = np.array([np.count_nonzero(a == v) for v in values])
    cb = np.array([np.count_nonzero(b == v) for v in values])
    rows_a, rows_b, acc_a, acc_b = [], [], 0, 0
    for x, y in zip(ca, cb):
        acc_a += x
        acc_b += y
        if acc_a + acc_b >= 2 * min_count:
            rows_a.append(acc_a)
            rows_b.append(acc_b)
            acc_a = acc_b = 0
    if acc_a + acc_b:
        rows_a[-1] += acc_a
        rows_b[-1] += acc_b
    return chi2_contingency(np.array([rows_a, rows_b]))[1]
