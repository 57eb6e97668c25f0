"""Closed-form quantities: sliding-window Markov chain, stationary codeword
frequencies, expected posting-list sizes, and first-order efficiency
formulas for k-gram and run-length codes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .bits import hamming_weight
from .codes import PostingCode

__all__ = [
    "MarkovChain",
    "kgram_transition_matrix",
    "stationary_distribution",
    "kgram_stationary_closed_form",
    "codeword_frequency",
    "analytic_list_size",
    "binomial_mgf",
    "expected_kgram_list_size",
    "mean_log2_kgram_list_size",
    "EfficiencyFormula",
    "kgram_efficiency",
    "rle_efficiency",
]

_MAX_DENSE_K = 12
_DIRECT_SOLVE_LIMIT = 256


@dataclass(frozen=True)
class MarkovChain:
    """Row-stochastic transition matrix over k-gram states."""

    matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def kgram_transition_matrix(k: int, p: float) -> MarkovChain:
    """Chain of the sliding k-gram window over a Bernoulli(p) source.

    State i is the k-gram with binary value i; sliding one position drops the
    most significant bit and appends a fresh symbol, so i moves to
    (2i mod 2**k) with probability 1-p and to (2i mod 2**k) + 1 with
    probability p.
    """
    if not 1 <= k <= _MAX_DENSE_K:
        raise ValueError(f"k must be in [1, {_MAX_DENSE_K}] for a dense matrix")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    m = 1 << k
    states = np.arange(m)
    lower = (2 * states) % m
    matrix = np.zeros((m, m))
    matrix[states, lower] = 1.0 - p
    matrix[states, lower + 1] = p
    return MarkovChain(matrix)


def stationary_distribution(
    chain: MarkovChain, *, tol: float = 1e-12, max_iterations: int = 10**6
) -> np.ndarray:
    """The probability vector fixed by the chain's transition matrix."""
    matrix = chain.matrix
    m = chain.size
    if m <= _DIRECT_SOLVE_LIMIT:
        system = matrix.T - np.eye(m)
        system[-1, :] = 1.0
        rhs = np.zeros(m)
        rhs[-1] = 1.0
        pi = np.linalg.solve(system, rhs)
    else:
        pi = np.full(m, 1.0 / m)
        for _ in range(max_iterations):
            nxt = pi @ matrix
            if np.abs(nxt - pi).sum() < tol:
                pi = nxt
                break
            pi = nxt
        else:
            raise RuntimeError("power iteration did not converge")
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def kgram_stationary_closed_form(k: int, p: float) -> np.ndarray:
    """Stationary weight of k-gram i: p**w(i) * (1-p)**(k - w(i))."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    m = 1 << k
    weights = np.zeros(m, dtype=np.int64)
    for bit in range(k):
        weights += (np.arange(m) >> bit) & 1
    return p**weights * (1.0 - p) ** (k - weights)


def codeword_frequency(word: str, p: float) -> float:
    """Per-position probability that *word* starts at a source position."""
    w = hamming_weight(word)
    return p**w * (1.0 - p) ** (len(word) - w)


def analytic_list_size(code: PostingCode, p: float, n: float) -> dict[str, float]:
    """Expected posting-list size n * f(c) for every codeword."""
    if not code.complete:
        raise ValueError("expected sizes are defined for complete codes")
    return {w: n * codeword_frequency(w, p) for w in code.codewords}


def binomial_mgf(q: float, k: int, t: float) -> float:
    """Moment generating value (1 - q + q*t)**k of a Binomial(k, q) count."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return (1.0 - q + q * t) ** k


def expected_kgram_list_size(p: float, q: float, k: int) -> float:
    """Mean stationary frequency of a random k-gram query: ((1-p)(1-q) + pq)**k."""
    return ((1.0 - p) * (1.0 - q) + p * q) ** k


def mean_log2_kgram_list_size(p: float, q: float, k: int, n: float) -> float:
    """Mean of log2(n * f(g)) over k-gram queries g with i.i.d. Bernoulli(q) bits."""
    per_bit = (1.0 - q) * math.log2(1.0 - p) + q * math.log2(p)
    return math.log2(n) + k * per_bit


@dataclass(frozen=True)
class EfficiencyFormula:
    """First-order efficiency: dominant * (1 + correction / log2(n)).

    ``dominant`` is the expected number of table accesses per query in the
    large-n limit; ``correction`` collects the size-of-list constants. The
    ``alternates`` mapping carries variant constants discussed in the module
    docstrings; pass one to :meth:`value_at` to use it instead.
    """

    dominant: float
    correction: float
    alternates: Mapping[str, float]

    def value_at(self, n: float, correction: float | None = None) -> float:
        c = self.correction if correction is None else correction
        return self.dominant * (1.0 + c / math.log2(n))


def kgram_efficiency(p: float, q: float, k: int, length_law) -> EfficiencyFormula:
    """First-order efficiency of a k-gram code under i.i.d. queries.

    The dominant term counts covering codewords: the quotient z of the query
    length by k, plus 2**(k-r) tail codewords when the remainder r is
    positive. The correction k*log2((1-p)(1-q) + pq) uses the log of the
    expected list size; the alternate ``correction_elog`` uses the expected
    log, which is what per-trial covering costs average. The alternate
    ``dominant_conditional`` replaces the unconditional tail term with its
    expectation conditioned on r > 0.
    """
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise ValueError("p and q must lie strictly between 0 and 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    e_z = 0.0
    tail_uncond = 0.0
    p_tail = 0.0
    for length, prob in length_law.items():
        z, r = divmod(length, k)
        e_z += prob * z
        if r:
            tail_uncond += prob * 2.0 ** (k - r)
            p_tail += prob
    tail_cond = tail_uncond / p_tail if p_tail > 0.0 else 0.0
    base = (1.0 - p) * (1.0 - q) + p * q
    correction = k * math.log2(base)
    correction_elog = k * ((1.0 - q) * math.log2(1.0 - p) + q * math.log2(p))
    return EfficiencyFormula(
        dominant=e_z + tail_uncond,
        correction=correction,
        alternates=MappingProxyType(
            {
                "dominant_conditional": e_z + tail_cond,
                "correction_elog": correction_elog,
            }
        ),
    )


def rle_efficiency(p: float, q: float, m: int, run_law) -> EfficiencyFormula:
    """First-order efficiency of a run-length code under run queries.

    The dominant term is the expected number of runs per query. The default
    correction is the closed form log2(pq / ((1-(1-p)(1-q)) * (1-(1-q)**(m-1)))).
    Two alternates are exposed: ``correction_run_product_mean`` is
    log2(pq / (1-(1-p)(1-q))), the exact mean over the run-length law of the
    per-run product of codeword frequencies (the closed form above folds in an
    extra remainder normalization and differs from the exact sum);
    ``correction_run_log_mean`` is the mean of the log of that product, which
    is what sampled per-run costs average.
    """
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise ValueError("p and q must lie strictly between 0 and 1")
    if m < 2:
        raise ValueError("m must be >= 2")
    pb = 1.0 - p
    qb = 1.0 - q
    correction = math.log2(p * q / ((1.0 - pb * qb) * (1.0 - qb ** (m - 1))))
    product_mean = math.log2(p * q / (1.0 - pb * qb))
    log_mean = math.log2(p) + (qb / q) * math.log2(pb)
    return EfficiencyFormula(
        dominant=run_law.mean(),
        correction=correction,
        alternates=MappingProxyType(
            {
                "correction_run_product_mean": product_mean,
                "correction_run_log_mean": log_mean,
            }
        ),
    )
