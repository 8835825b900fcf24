"""Permutation output space: enumeration, NDCG, losses, target distributions.

A ranking ``y`` is an integer vector where ``y[i]`` is the rank position
(1-based) assigned to document ``i``.  NDCG uses raw relevance grades as
gains with a ``log(2)/log(1 + position)`` discount, normalized so any
ideal ordering scores exactly 1.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.special import softmax

from .errors import CapacityError, ContractError

PERMUTATION_CAP = 8

ZERO_LOSS_TOL = 1e-12

_perm_cache: dict = {}


def enumerate_permutations(m: int) -> np.ndarray:
    """All m! rank vectors, lexicographically ordered, as an (m!, m) array.

    Cached per m; callers must treat the result as read-only.
    """
    if m < 1:
        raise ContractError(f"m must be >= 1, got {m}")
    if m > PERMUTATION_CAP:
        raise CapacityError(
            f"m={m} exceeds the enumeration cap {PERMUTATION_CAP} "
            f"({PERMUTATION_CAP}! = {math.factorial(PERMUTATION_CAP)} permutations)"
        )
    if m not in _perm_cache:
        perms = np.array(list(itertools.permutations(range(1, m + 1))), dtype=np.int64)
        perms.setflags(write=False)
        _perm_cache[m] = perms
    return _perm_cache[m]


def rank_discounts(m: int) -> np.ndarray:
    """Discount log(2)/log(i+1) for rank positions i = 1..m."""
    return np.log(2.0) / np.log(np.arange(2, m + 2, dtype=np.float64))


def _dcg(y: np.ndarray, r: np.ndarray) -> float:
    return float(np.sum(r * np.log(2.0) / np.log(1.0 + y)))


def _check_lengths(y, r) -> tuple:
    y = np.asarray(y, dtype=np.int64)
    r = np.asarray(r, dtype=np.float64)
    if y.shape != r.shape:
        raise ContractError(f"ranking length {y.shape} != relevance length {r.shape}")
    return y, r


def ideal_permutation(r) -> np.ndarray:
    """Ranks by decreasing relevance; ties broken by ascending document index."""
    r = np.asarray(r)
    order = np.argsort(-r, kind="stable")
    ranks = np.empty(len(r), dtype=np.int64)
    ranks[order] = np.arange(1, len(r) + 1)
    return ranks


def ndcg(y, r) -> float:
    """NDCG with raw-grade gains; 0.0 when every document is irrelevant."""
    y, r = _check_lengths(y, r)
    ideal = _dcg(ideal_permutation(r), r)
    if ideal == 0.0:
        return 0.0
    return _dcg(y, r) / ideal


def ndcg_at_k(y, r, k: int) -> float:
    """NDCG truncated at rank k, normalized by the truncated ideal DCG."""
    if k < 1:
        raise ContractError(f"k must be >= 1, got {k}")
    y, r = _check_lengths(y, r)
    m = len(r)
    kk = min(k, m)
    discounts = rank_discounts(kk)
    ideal = float(np.sum(np.sort(r)[::-1][:kk] * discounts))
    if ideal == 0.0:
        return 0.0
    top = y <= kk
    dcg = float(np.sum(r[top] * np.log(2.0) / np.log(1.0 + y[top])))
    return dcg / ideal


def loss(y, r) -> float:
    """Task loss 1 - NDCG, in [0, 1]."""
    return 1.0 - ndcg(y, r)


def loss_table(perms: np.ndarray, r) -> np.ndarray:
    """Losses 1 - NDCG for every permutation in an enumeration, vectorized.

    Relies on the NDCG discount equaling rank_discounts, so that
    DCG(y) = sum_i r_i * discount[y_i].
    """
    r = np.asarray(r, dtype=np.float64)
    if perms.shape[1] != len(r):
        raise ContractError("enumeration width does not match relevance length")
    discounts = rank_discounts(perms.shape[1])
    dcg = discounts[perms - 1] @ r
    ideal = _dcg(ideal_permutation(r), r)
    if ideal == 0.0:
        return np.ones(perms.shape[0])
    return 1.0 - dcg / ideal


def zero_loss_set(r, perms: np.ndarray) -> np.ndarray:
    """Indices of permutations with zero loss (the valid ground truths)."""
    losses = loss_table(perms, r)
    return np.flatnonzero(np.abs(losses) <= ZERO_LOSS_TOL)


def target_distribution(losses, temperature: float) -> np.ndarray:
    """Loss-derived reference distribution exp(-loss/T) / Z.

    Computed with max-subtraction (softmax); strictly positive, sums to 1.
    """
    if temperature <= 0.0:
        raise ContractError(f"temperature must be > 0, got {temperature}")
    losses = np.asarray(losses, dtype=np.float64)
    if losses.size == 0:
        raise ContractError("losses must be non-empty")
    return softmax(-losses / temperature)
