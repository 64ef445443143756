"""Samplers and moment oracles: Dirichlet, GEM/PD sticks and diversity,
generalized Mittag-Leffler laws and their Markov chain, Chinese restaurant
processes, and classical / two-colour generalized Polya urns.

All samplers take a ``numpy.random.Generator`` and are deterministic given
its state.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import gammaln

from ._jit import njit
from .errors import ParameterError, ResolutionError, ValidationError


def _check_alpha_theta(alpha, theta):
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0,1), got {alpha}")
    if not theta > -alpha:
        raise ParameterError(f"theta must exceed -alpha, got theta={theta}, alpha={alpha}")


# ---------------------------------------------------------------- Dirichlet

@dataclass(frozen=True)
class DirichletParams:
    weights: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) == 0:
            raise ParameterError("Dirichlet needs at least one weight")
        if any(not x > 0 for x in w):
            raise ParameterError(f"Dirichlet weights must be positive, got {w}")
        object.__setattr__(self, "weights", w)


def sample_dirichlet(params, rng, size=None):
    """Dir(a_1..a_n) via normalized Gamma variables, computed in log space.

    Small shape parameters underflow plain Gamma draws to zero, so we use
    G_a = G_{a+1} * U^{1/a} in logs.
    """
    if not isinstance(params, DirichletParams):
        params = DirichletParams(tuple(params))
    a = np.asarray(params.weights)
    shape = (a.size,) if size is None else (size, a.size)
    logg = np.log(rng.standard_gamma(a + 1.0, size=shape)) + np.log(rng.random(shape)) / a
    logg -= logg.max(axis=-1, keepdims=True)
    g = np.exp(logg)
    return g / g.sum(axis=-1, keepdims=True)


# ---------------------------------------------------------------- GEM / PD

@dataclass
class StickSequence:
    """Truncated stick-breaking sequence.

    ``residual`` is the mass not yet allocated, prod (1 - B_k).  When the
    sticks come from GEM(alpha, theta) they can be extended lazily.
    """
    alpha: float
    theta: float
    fractions: np.ndarray
    residual: float = None
    diversity_estimate: float = None
    gem: bool = False

    def __post_init__(self):
        self.fractions = np.asarray(self.fractions, dtype=float)
        if np.any(self.fractions < 0):
            raise ValidationError("stick fractions must be nonnegative")
        if self.residual is None:
            self.residual = max(0.0, 1.0 - float(self.fractions.sum()))

    def __len__(self):
        return self.fractions.size

    def extend(self, count, rng):
        """Append ``count`` further GEM sticks (only for GEM-generated sequences)."""
        if not self.gem:
            raise ResolutionError("deterministic stick sequences cannot be extended")
        start = self.fractions.size
        idx = np.arange(start + 1, start + count + 1)
        b = rng.beta(1.0 - self.alpha, self.theta + idx * self.alpha)
        logres = math.log(self.residual) if self.residual > 0 else -np.inf
        lr = logres + np.concatenate([[0.0], np.cumsum(np.log1p(-b))])
        new = b * np.exp(lr[:-1])
        self.fractions = np.concatenate([self.fractions, new])
        self.residual = float(np.exp(lr[-1]))
        return self


def sample_gem(alpha, theta, n_sticks, rng, residual_tol=1e-6, max_sticks=10**5):
    """GEM(alpha, theta) sticks P_i = B_i prod_{k<i} (1 - B_k), B_i ~ Beta(1-alpha, theta+i*alpha).

    With ``n_sticks=None`` the sequence is extended in chunks until the residual
    drops below ``residual_tol`` or ``max_sticks`` is reached.
    """
    _check_alpha_theta(alpha, theta)
    seq = StickSequence(alpha, theta, np.zeros(0), residual=1.0, gem=True)
    if n_sticks is not None:
        if n_sticks < 1:
            raise ParameterError("n_sticks must be positive")
        return seq.extend(int(n_sticks), rng)
    chunk = 1024
    while seq.residual >= residual_tol and len(seq) < max_sticks:
        seq.extend(min(chunk, max_sticks - len(seq)), rng)
        chunk *= 2
    return seq


class DiversityEstimate(float):
    """Float carrying how the diversity estimate was obtained."""

    def __new__(cls, value, index, truncation_biased=True):
        obj = super().__new__(cls, value)
        obj.index = index
        obj.truncation_biased = truncation_biased
        return obj


def diversity_estimate(sticks, alpha=None, normalization=None, window=None, min_sticks=100):
    """Plug-in estimate of the alpha-diversity, Gamma(1-alpha) * i * (P_i^desc)^alpha.

    The rank i used is the largest *certified* one: atoms larger than the
    unallocated residual are guaranteed to be ranked correctly, smaller ones
    may be outranked by unseen atoms.  ``window=(lo, hi)`` averages over ranks
    in [lo*i, hi*i] instead.  ``normalization`` overrides Gamma(1-alpha).
    """
    if isinstance(sticks, StickSequence):
        alpha = sticks.alpha if alpha is None else alpha
        p = sticks.fractions
        residual = sticks.residual
    else:
        p = np.asarray(sticks, dtype=float)
        residual = max(0.0, 1.0 - float(p.sum()))
    if alpha is None or not 0.0 < alpha < 1.0:
        raise ParameterError("diversity needs alpha in (0,1)")
    if p.size < min_sticks:
        raise ResolutionError(f"need at least {min_sticks} sticks, got {p.size}")
    desc = np.sort(p)[::-1]
    certified = int(np.count_nonzero(desc > residual))
    if certified == 0:
        raise ResolutionError("no stick exceeds the residual mass")
    norm = math.gamma(1.0 - alpha) if normalization is None else normalization
    if window is None:
        i = certified
        value = norm * i * desc[i - 1] ** alpha
    else:
        lo = max(1, int(window[0] * certified))
        hi = max(lo, int(window[1] * certified))
        ranks = np.arange(lo, hi + 1)
        value = float(np.mean(norm * ranks * desc[ranks - 1] ** alpha))
        i = hi
    return DiversityEstimate(value, i, truncation_biased=residual > 0)


# ---------------------------------------------------------------- Mittag-Leffler

def ml_moment(alpha, theta, p):
    """p-th moment of ML(alpha, theta), computed through log-gamma."""
    _check_alpha_theta(alpha, theta)
    if p < 0:
        raise ParameterError("moment order must be nonnegative")
    args = (theta + 1.0, theta / alpha + p + 1.0, theta / alpha + 1.0, theta + p * alpha + 1.0)
    if any(x <= 0 for x in args):
        raise ParameterError(f"gamma pole in moment formula: {args}")
    return math.exp(math.lgamma(args[0]) + math.lgamma(args[1]) - math.lgamma(args[2]) - math.lgamma(args[3]))


@njit(cache=True)
def _table_count_chain(alpha, theta, n0, k0, u):
    n = n0
    k = k0
    for j in range(u.shape[0]):
        if u[j] * (n + theta) < theta + k * alpha:
            k += 1
        n += 1
    return k


def crp_table_count(alpha, theta, n, rng, chunk=1 << 20):
    """Number of tables K_n of a CRP(alpha, theta) after n customers."""
    _check_alpha_theta(alpha, theta)
    k, seated = 1, 1
    while seated < n:
        m = min(chunk, n - seated)
        k = _table_count_chain(alpha, theta, seated, k, rng.random(m))
        seated += m
    return k


def sample_ml(alpha, theta, resolution=10**5, rng=None, size=None, normalization="martingale"):
    """Approximate ML(alpha, theta) draws from the table count of a CRP run.

    ``normalization="power"`` returns K_n / n^alpha.  The default uses the
    martingale (K_n + theta/alpha) * Gamma(n+theta) / Gamma(n+theta+alpha),
    which has the exact ML mean at every resolution and the same limit; the
    remaining error is a loss of variance of relative order (theta/n)^alpha.
    """
    _check_alpha_theta(alpha, theta)
    if resolution < 10**3:
        raise ResolutionError(f"resolution must be at least 1000, got {resolution}")
    n = int(resolution)
    if normalization == "power":
        scale = n ** -alpha
        shift = 0.0
    elif normalization == "martingale":
        scale = math.exp(math.lgamma(n + theta) - math.lgamma(n + theta + alpha))
        shift = theta / alpha
    else:
        raise ParameterError(f"unknown normalization {normalization!r}")
    count = 1 if size is None else int(size)
    out = np.empty(count)
    for r in range(count):
        out[r] = (crp_table_count(alpha, theta, n, rng) + shift) * scale
    return out[0] if size is None else out


@dataclass
class MLMCSample:
    alpha: float
    theta: float
    values: np.ndarray
    increments: np.ndarray = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.increments is None:
            self.increments = np.diff(self.values, prepend=0.0)


def sample_mlmc(alpha, theta, n, rng, resolution=None):
    """Path M_1..M_n of the Mittag-Leffler Markov chain MLMC(alpha, theta).

    M_n ~ ML(alpha, theta+n-1) comes from ``sample_ml``; the chain is then
    filled backwards with M_k = B_k M_{k+1}, B_k ~ Beta((theta+k-1)/alpha + 1, 1/alpha - 1).
    The default resolution grows with theta+n so the top marginal stays accurate.
    """
    _check_alpha_theta(alpha, theta)
    if n < 1:
        raise ParameterError("n must be at least 1")
    if resolution is None:
        resolution = max(10**5, 32 * int(math.ceil(theta + n)))
    top = sample_ml(alpha, theta + n - 1, resolution, rng)
    k = np.arange(1, n)
    b = rng.beta((theta + k - 1) / alpha + 1.0, 1.0 / alpha - 1.0)
    logb = np.log(b)
    tail = np.concatenate([np.cumsum(logb[::-1])[::-1], [0.0]])
    values = top * np.exp(tail)
    return MLMCSample(alpha, theta, values)


# ---------------------------------------------------------------- CRP

@dataclass
class CrpState:
    alpha: float
    theta: float
    table_counts: np.ndarray
    draws: np.ndarray
    num_tables: int


@njit(cache=True)
def _crp_kernel(alpha, theta, u, counts, draws):
    counts[0] = 1
    draws[0] = 1
    k = 1
    for m in range(1, draws.shape[0]):
        x = u[m - 1] * (m + theta)
        new = theta + k * alpha
        if x < new:
            counts[k] = 1
            k += 1
            draws[m] = k
        else:
            x -= new
            j = 0
            while j < k - 1 and x >= counts[j] - alpha:
                x -= counts[j] - alpha
                j += 1
            counts[j] += 1
            draws[m] = j + 1
    return k


def crp_simulate(alpha, theta, n, rng):
    """Seat n customers with the (alpha, theta) seating plan, starting from one table."""
    _check_alpha_theta(alpha, theta)
    if n < 1:
        raise ParameterError("n must be at least 1")
    counts = np.zeros(n, dtype=np.int64)
    draws = np.zeros(n, dtype=np.int64)
    k = _crp_kernel(alpha, theta, rng.random(n - 1), counts, draws)
    return CrpState(alpha, theta, counts[:k].copy(), draws, int(k))


@njit(cache=True)
def _conditional_kernel(cum, u, draws):
    draws[0] = 1
    top = 1
    for m in range(1, draws.shape[0]):
        if u[m - 1] < cum[top - 1]:
            lo = 0
            hi = top - 1
            while lo < hi:
                mid = (lo + hi) // 2
                if cum[mid] > u[m - 1]:
                    hi = mid
                else:
                    lo = mid + 1
            draws[m] = lo + 1
        else:
            top += 1
            if top > cum.shape[0]:
                return -1
            draws[m] = top
    return top


def crp_conditional_draws(sticks, n, rng):
    """Labels D_1..D_n given the sticks: a seen label k w.p. P_k, else the next new label.

    Exact whenever n <= len(sticks); otherwise the sticks must leave residual
    mass below 1e-6 and a label beyond the truncation raises.
    """
    p = sticks.fractions if isinstance(sticks, StickSequence) else np.asarray(sticks, float)
    residual = sticks.residual if isinstance(sticks, StickSequence) else max(0.0, 1 - p.sum())
    if p.size < n and residual >= 1e-6:
        raise ResolutionError(f"residual stick mass {residual:.3g} too large for {n} draws")
    draws = np.zeros(n, dtype=np.int64)
    if _conditional_kernel(np.cumsum(p), rng.random(max(n - 1, 0)), draws) < 0:
        raise ResolutionError("draws ran past the stick truncation")
    return draws


# ---------------------------------------------------------------- urns

@dataclass
class UrnState:
    weights: np.ndarray
    step_increment: object
    draw_history: np.ndarray

    def proportions(self):
        return self.weights / self.weights.sum()


@njit(cache=True)
def _polya_kernel(weights, beta, u, history):
    total = 0.0
    for c in range(weights.shape[0]):
        total += weights[c]
    last = weights.shape[0] - 1
    for s in range(u.shape[0]):
        x = u[s] * total
        c = 0
        while c < last and x >= weights[c]:
            x -= weights[c]
            c += 1
        weights[c] += beta
        total += beta
        history[s] = c


def polya_urn(initial_weights, beta, steps, rng):
    """Classical urn: draw a colour proportionally to weight, add ``beta`` to it."""
    w = np.array(initial_weights, dtype=float)
    if w.ndim != 1 or w.size == 0 or np.any(w <= 0):
        raise ParameterError("initial weights must be positive")
    if not beta > 0:
        raise ParameterError("beta must be positive")
    history = np.zeros(steps, dtype=np.int32)
    _polya_kernel(w, float(beta), rng.random(steps), history)
    return UrnState(w, float(beta), history)


@njit(cache=True)
def _generalized_urn_kernel(weights, matrix, u, history):
    for s in range(u.shape[0]):
        x = u[s] * (weights[0] + weights[1])
        c = 0 if x < weights[0] else 1
        weights[0] += matrix[c, 0]
        weights[1] += matrix[c, 1]
        history[s] = c


def _check_balanced(matrix):
    m = np.asarray(matrix, dtype=float)
    if m.shape != (2, 2):
        raise ValidationError("replacement matrix must be 2x2")
    if np.any(m < 0):
        raise ValidationError("replacement matrix entries must be nonnegative")
    if not math.isclose(m[0].sum(), m[1].sum(), rel_tol=1e-12, abs_tol=1e-12):
        raise ValidationError("replacement matrix must be balanced (equal row sums)")
    return m


def generalized_urn(initial_weights, matrix, steps, rng):
    """Two-colour balanced urn: drawing colour i adds row i of ``matrix``."""
    m = _check_balanced(matrix)
    w = np.array(initial_weights, dtype=float)
    if w.shape != (2,) or np.any(w < 0) or w.sum() <= 0:
        raise ParameterError("need two nonnegative initial weights with positive sum")
    history = np.zeros(steps, dtype=np.int32)
    _generalized_urn_kernel(w, m, rng.random(steps), history)
    return UrnState(w, m, history)


def generalized_urn_limit(replacement_matrix):
    """(lambda_1, v_1): row sum and the left Perron eigenvector normalized to sum 1."""
    m = _check_balanced(replacement_matrix)
    lam = float(m[0].sum())
    vals, vecs = np.linalg.eig(m.T)
    j = int(np.argmin(np.abs(vals - lam)))
    v = np.real(vecs[:, j])
    v = v / v.sum()
    return lam, v
