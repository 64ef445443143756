"""Self-similar and almost-self-similar random decorations.

Every address u draws i.i.d. data (sticks P_{u1}, P_{u2}, ... and a block);
its block is scaled by (product of the sticks along the ancestry of u)^beta.
The root may follow a different law.
"""
from dataclasses import dataclass
import math

import numpy as np

from ..distributions import StickSequence, diversity_estimate, sample_gem
from ..errors import ParameterError
from ..glue import Decoration, GluedSpace, MeasureOnUlam
from ..ulam import ROOT
from .gluing import GluingResult, unit_segment_sampler


@dataclass
class NodeLaw:
    """``sticks(rng)`` returns an array or StickSequence; ``block(sticks, n_attach, rng)``
    returns the unscaled block with at least ``n_attach`` attach points."""
    sticks: object
    block: object


def stick_array(sticks):
    return sticks.fractions if isinstance(sticks, StickSequence) else np.asarray(sticks, dtype=float)


@dataclass
class SelfSimilarSpec:
    beta: float
    law: NodeLaw
    root_law: NodeLaw = None
    depth_cap: int = 12
    diameter_floor: float = 1e-3
    diameter_bound: float = None      # almost-sure bound on unscaled block diameters
    stick_bound: float = None         # almost-sure bound on every stick
    moment_p: float = None            # p with E[diam^p] finite; default max(1, 2/beta)
    contraction_samples: int = 2000

    def __post_init__(self):
        if not self.beta > 0:
            raise ParameterError("beta must be positive")
        if self.root_law is None:
            self.root_law = self.law
        if self.moment_p is None:
            self.moment_p = max(1.0, 2.0 / self.beta)
        if self.depth_cap < 0 or self.diameter_floor < 0:
            raise ParameterError("truncation parameters must be nonnegative")


def contraction_estimate(spec, rng, p=None, samples=None):
    """Monte Carlo estimate of E[sum_j P_j^(p beta)] for the generic law, with its standard error."""
    p = spec.moment_p if p is None else p
    samples = spec.contraction_samples if samples is None else samples
    vals = np.empty(samples)
    for r in range(samples):
        P = stick_array(spec.law.sticks(rng))
        vals[r] = float(np.sum(P[P > 0] ** (p * spec.beta)))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0


def diameter_moment(law, p, rng, samples=200, n_points=64):
    """(E[diam^p])^(1/p) of unscaled blocks, estimated by simulation on blocks
    carrying ``n_points`` distinguished points."""
    d = np.array([law.block(law.sticks(rng), n_points, rng).diameter() for _ in range(samples)])
    return float(np.mean(d ** p) ** (1.0 / p))


def self_similar_sample(spec, rng, check=True):
    """Sample the decoration down to the truncation policy.

    A child is pruned when (its cumulative mass)^beta times the diameter
    scale falls below ``diameter_floor`` or when it would exceed ``depth_cap``.
    The measure gives T(u) mass prod P along u; mass below pruned children
    (and unallocated stick mass) is kept as an atom on the parent.

    Result attributes: ``gap_bound`` (almost-sure bound on the distance from
    the truncation to the full space, when ``diameter_bound`` and
    ``stick_bound`` are given, else None), ``lp_gap_bound`` (L^p bound from
    the contraction estimate), ``contraction``, ``sticks``.
    """
    p = spec.moment_p
    rho, rho_err = contraction_estimate(spec, rng)
    if check and rho >= 1.0:
        raise ParameterError(f"contraction condition fails: estimated E[sum P^(p beta)] = {rho:.6g} "
                             f"(+/- {rho_err:.2g}) >= 1 for p={p}, beta={spec.beta}")
    dscale = spec.diameter_bound if spec.diameter_bound is not None else diameter_moment(spec.law, 1.0, rng)
    blocks, subtree, atoms, sticks_at = {}, {}, {}, {}
    pruned_masses = []
    queue = [(ROOT, 1.0)]
    head = 0
    while head < len(queue):
        u, mass = queue[head]
        head += 1
        law = spec.root_law if u == ROOT else spec.law
        raw = law.sticks(rng)
        P = stick_array(raw)
        sticks_at[u] = P
        subtree[u] = mass
        kept = []
        for i, pi in enumerate(P, start=1):
            if pi <= 0:
                continue
            cm = mass * pi
            if len(u) + 1 > spec.depth_cap or cm ** spec.beta * dscale < spec.diameter_floor:
                pruned_masses.append(cm)
            else:
                kept.append(i)
        n_attach = kept[-1] if kept else 0
        blk = law.block(raw, n_attach, rng)
        blk = blk.with_attach(blk.attach[:n_attach])
        blocks[u] = blk.scaled(mass ** spec.beta)
        atoms[u] = mass - sum(mass * P[i - 1] for i in kept)
        for i in kept:
            queue.append((u + (i,), mass * P[i - 1]))
    dec = Decoration(blocks)
    measure = MeasureOnUlam(atoms, subtree)
    gap = None
    if spec.diameter_bound is not None and spec.stick_bound is not None and spec.stick_bound < 1:
        factor = spec.diameter_bound / (1.0 - spec.stick_bound ** spec.beta)
        gap = factor * max((m ** spec.beta for m in pruned_masses), default=0.0)
    lp_gap = None
    if rho < 1.0:
        dp = diameter_moment(spec.law, p, rng)
        tail = sum(m ** (p * spec.beta) for m in pruned_masses) ** (1.0 / p)
        lp_gap = dp / (1.0 - rho ** (1.0 / p)) * tail
    return GluingResult(dec, GluedSpace(dec), measure, gap_bound=gap, lp_gap_bound=lp_gap,
                        contraction=rho, sticks=sticks_at, n_blocks=len(blocks))


def ray_root_distance(spec, rng, tolerance=1e-4, max_depth=10**4):
    """Distance from the root to a mu-distributed leaf, sampling only the ray.

    The child is picked with probability P_i (renormalized over the sampled
    sticks); the walk stops once the scale left is below ``tolerance``.
    """
    dscale = spec.diameter_bound if spec.diameter_bound is not None else 1.0
    total, mass, u = 0.0, 1.0, ROOT
    for depth in range(max_depth):
        law = spec.root_law if depth == 0 else spec.law
        raw = law.sticks(rng)
        P = stick_array(raw)
        cum = np.cumsum(P)
        i = int(min(np.searchsorted(cum, rng.random() * cum[-1], side="right"), P.size - 1)) + 1
        blk = law.block(raw, i, rng)
        total += mass ** spec.beta * blk.distance(blk.root, blk.attach_index(i))
        mass *= P[i - 1]
        if mass ** spec.beta * dscale < tolerance:
            return total
    return total


# ---------------------------------------------------------------- standard laws

def deterministic_sticks(values):
    values = np.asarray(values, dtype=float)
    return lambda rng: values


def gem_sticks(alpha, theta, n_sticks=None):
    return lambda rng: sample_gem(alpha, theta, n_sticks, rng)


def unit_segment_law(sticks):
    """Unit segment rooted at 0 with uniform attach points."""
    return NodeLaw(sticks, lambda s, n, rng: unit_segment_sampler(None, n, rng))


def ass_from_iterative(b, a, gamma, block_laws, n_sticks=None, **truncation):
    """Almost-self-similar description of the iterative gluing with MLMC(1/(b+1), a/(b+1))
    weights, scaling factors m_n^gamma and i.i.d. blocks from the second on.

    ``block_laws`` is one callable (n_points, rng) -> Block used for every
    block, or a pair (first block law, law of the others).  Exponent
    gamma/(b+1); sticks GEM(1/(b+1), a/(b+1)) at the root and GEM(1/(b+1),
    b/(b+1)) elsewhere; each block is rescaled by S^gamma, S the diversity of
    its own sticks.
    """
    if not a > -1:
        raise ParameterError(f"a must exceed -1, got {a}")
    if not b > 0:
        raise ParameterError(f"b must be positive, got {b}")
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    if callable(block_laws):
        first = other = block_laws
    else:
        first, other = block_laws
    alpha = 1.0 / (b + 1.0)

    def rescaled(law):
        def block(sticks, n, rng):
            S = float(diversity_estimate(sticks, alpha=alpha))
            blk = law(n, rng)
            return getattr(blk, "block", blk).scaled(S ** gamma)
        return block

    root = NodeLaw(gem_sticks(alpha, a / (b + 1.0), n_sticks), rescaled(first))
    generic = NodeLaw(gem_sticks(alpha, b / (b + 1.0), n_sticks), rescaled(other))
    return SelfSimilarSpec(gamma / (b + 1.0), generic, root_law=root, **truncation)
