"""Markov measures on 1-D SFTs: Parry measure, cylinder probabilities, SMB sampling.

Sampling uses numpy's PCG64 bit generator (64-bit state increment, 128-bit
LCG with XSL-RR output) seeded directly with the user's decimal seed, so a
given seed reproduces the same point on every platform.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .core import Pattern
from .errors import Reducible, ZeroMatrix
from .sft import TransferMatrix, power_iteration

STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    """Stationary Markov chain on block states.

    ``states`` are tuples of symbol indices of a common length (the block
    length); the emitted point reads the first state in full and then the last
    symbol of every subsequent state.
    """

    alphabet: tuple
    states: tuple
    P: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "pi", pi)
        k = len(self.states)
        if P.shape != (k, k) or pi.shape != (k,):
            raise ValueError("P must be square and pi must match the number of states")
        if (P < 0).any() or (pi < 0).any():
            raise ValueError("probabilities must be nonnegative")
        if np.max(np.abs(P.sum(axis=1) - 1.0)) > STOCHASTIC_TOL:
            raise ValueError("rows of P must sum to 1")
        if abs(pi.sum() - 1.0) > STOCHASTIC_TOL:
            raise ValueError("pi must sum to 1")
        if np.max(np.abs(pi @ P - pi)) > STOCHASTIC_TOL:
            raise ValueError("pi is not stationary for P")

    @property
    def block(self) -> int:
        return len(self.states[0])

    def support_ok(self, tm: TransferMatrix) -> bool:
        """True when P only uses transitions the transfer matrix allows."""
        return bool(((self.P > 0) <= (tm.m > 0)).all())


def bernoulli_measure(alphabet: Sequence[str], probs: Sequence[float] | None = None) -> MarkovMeasure:
    q = len(alphabet)
    p = np.full(q, 1.0 / q) if probs is None else np.asarray(probs, dtype=float)
    return MarkovMeasure(tuple(alphabet), tuple((i,) for i in range(q)), np.tile(p, (q, 1)), p)


def is_irreducible(m) -> bool:
    m = np.asarray(m)
    if m.shape[0] == 0:
        return False
    n_comp, _ = connected_components(m != 0, directed=True, connection="strong")
    return n_comp == 1 and (m.shape[0] > 1 or m[0, 0] != 0)


def parry_measure(tm: TransferMatrix, tol: float = 1e-12) -> MarkovMeasure:
    """Measure of maximal entropy on an irreducible transfer matrix.

    P[i, j] = m[i, j] v[j] / (lambda v[i]) and pi_i proportional to u_i v_i,
    with u, v the left and right Perron vectors.
    """
    m = np.asarray(tm.m, dtype=float)
    if m.size == 0 or not m.any():
        raise ZeroMatrix("transfer matrix is zero")
    if not is_irreducible(m):
        raise Reducible("transfer matrix is not irreducible")
    lam, v = power_iteration(m, tol, vector_tol=tol)
    _, u = power_iteration(m.T, tol, vector_tol=tol)
    P = m * v[None, :] / (lam * v[:, None])
    # clear the O(tol) residue of the eigenvector so rows are stochastic to rounding
    P /= P.sum(axis=1, keepdims=True)
    pi = u * v
    pi /= pi.sum()
    # one exact step of the chain pins stationarity at machine precision
    pi = pi @ P
    pi /= pi.sum()
    return MarkovMeasure(tm.alphabet, tm.states, P, pi)


def _xlog2x(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def measure_entropy(mu: MarkovMeasure) -> float:
    """-sum_i pi_i sum_j P_ij log2 P_ij, with 0 log 0 = 0."""
    return float(-(mu.pi * _xlog2x(mu.P).sum(axis=1)).sum())


def _word_values(word) -> list[int]:
    if isinstance(word, Pattern):
        return word.values_in(word.sorted_points())
    return list(word)


def cylinder_probability(mu: MarkovMeasure, word) -> float:
    """log2 mu([[word]]); ``-inf`` marks a word outside the support."""
    w = _word_values(word)
    k = mu.block
    if len(w) == 0:
        return 0.0
    index = {s: i for i, s in enumerate(mu.states)}
    if len(w) < k:
        mass = sum(p for s, p in zip(mu.states, mu.pi) if tuple(s[: len(w)]) == tuple(w))
        return math.log2(mass) if mass > 0 else -math.inf
    first = index.get(tuple(w[:k]))
    if first is None or mu.pi[first] <= 0:
        return -math.inf
    total = math.log2(mu.pi[first])
    prev = first
    for t in range(1, len(w) - k + 1):
        cur = index.get(tuple(w[t : t + k]))
        if cur is None:
            return -math.inf
        p = mu.P[prev, cur]
        if p <= 0:
            return -math.inf
        total += math.log2(p)
        prev = cur
    return total


def sample_point(mu: MarkovMeasure, seed: int, length: int) -> Pattern:
    """Seeded sample of a length-``length`` word, as a pattern on F_{length-1}."""
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    k = mu.block
    steps = max(length - k, 0)
    u = rng.random(steps + 1)
    cum_pi = list(np.cumsum(mu.pi))
    cum_pi[-1] = 1.0
    cum_rows = []
    for row in mu.P:
        c = list(np.cumsum(row))
        c[-1] = 1.0
        cum_rows.append(c)
    state = bisect.bisect_right(cum_pi, u[0])
    out = list(mu.states[state])
    for t in range(steps):
        state = bisect.bisect_right(cum_rows[state], u[t + 1])
        out.append(mu.states[state][-1])
    return Pattern.word(mu.alphabet, out[:length])


@dataclass(frozen=True)
class SmbSample:
    seed: int
    n: int
    minus_log2_mu_cylinder: float
    normalized: float


@dataclass(frozen=True)
class SmbReport:
    samples: list
    entropy: float
    mean: float
    max_deviation: float
    support_violations: int


def smb_check(mu: MarkovMeasure, seeds: Sequence[int], n: int) -> SmbReport:
    """Empirical -log2 mu([[x|F_n]]) / |F_n| for one sampled point per seed.

    Points are sampled on F_n = {0..n}, so |F_n| = n + 1. Samples are ordered
    as the seeds are given.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    size = n + 1
    ent = measure_entropy(mu)
    samples = []
    violations = 0
    for seed in seeds:
        x = sample_point(mu, seed, size)
        lp = cylinder_probability(mu, x)
        if lp == -math.inf:
            violations += 1
        samples.append(SmbSample(seed, n, -lp, -lp / size))
    finite = [s.normalized for s in samples if math.isfinite(s.normalized)]
    mean = float(np.mean(finite)) if finite else math.nan
    dev = max((abs(v - ent) for v in finite), default=math.nan)
    return SmbReport(samples, ent, mean, dev, violations)
