"""Linear scoring CRF core: scores, position weights, energy, prediction.

The energy of a ranking is E(y) = -sum_i alpha[y_i] * s_i with strictly
decreasing position weights alpha, so the minimum-energy ranking is the
descending argsort of the scores.
"""
from __future__ import annotations

import numpy as np

from .errors import ContractError, DimensionError
from .letor import QueryGroup
from .rankspace import rank_discounts

CHECKPOINT_HEADER = "crf-rank-theta v1"


def position_weights(m: int) -> np.ndarray:
    """NDCG-inspired weights log(2)/log(i+1) for positions i = 1..m."""
    if m < 1:
        raise ContractError(f"m must be >= 1, got {m}")
    return rank_discounts(m)


def score(theta: np.ndarray, group: QueryGroup) -> np.ndarray:
    """Per-document scores theta . phi(q, d)."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (group.feature_dim,):
        raise DimensionError(
            f"theta has dimension {theta.shape}, group features have {group.feature_dim}"
        )
    return group.feature_matrix @ theta


def energy(y, scores, alpha) -> float:
    """E(y) = -sum_i alpha[y_i] * s_i."""
    y = np.asarray(y, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if y.shape != scores.shape or len(alpha) < len(y):
        raise ContractError("ranking, scores and position weights disagree in length")
    return float(-np.sum(np.asarray(alpha)[y - 1] * scores))


def energy_grad_theta(y, group: QueryGroup, alpha) -> np.ndarray:
    """dE/dtheta = -sum_i alpha[y_i] * phi(q, d_i)."""
    y = np.asarray(y, dtype=np.int64)
    if len(y) != group.num_docs or len(alpha) < len(y):
        raise ContractError("ranking and group disagree in length")
    return -(np.asarray(alpha)[y - 1] @ group.feature_matrix)


def predict(scores) -> np.ndarray:
    """Minimum-energy ranking: descending scores, ties by ascending index."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise ContractError("scores must be non-empty")
    order = np.argsort(-scores, kind="stable")
    ranks = np.empty(len(scores), dtype=np.int64)
    ranks[order] = np.arange(1, len(scores) + 1)
    return ranks


def save_theta(path, theta: np.ndarray) -> None:
    """Write a checkpoint: header line then one full-precision float per line."""
    theta = np.asarray(theta, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{CHECKPOINT_HEADER} d={len(theta)}\n")
        for v in theta:
            fh.write(f"{float(v)!r}\n")


def load_theta(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith(CHECKPOINT_HEADER) or "d=" not in header:
            raise ContractError(f"unrecognized checkpoint header: {header!r}")
        d = int(header.split("d=")[1])
        values = [float(line) for line in fh if line.strip()]
    if len(values) != d:
        raise ContractError(f"checkpoint declares d={d} but contains {len(values)} values")
    return np.array(values, dtype=np.float64)
