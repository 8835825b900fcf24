"""NDCG@k evaluation over datasets and five-fold reporting."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DimensionError
from .letor import Dataset
from .model import predict, score


@dataclass(frozen=True)
class EvalReport:
    """Per-query NDCG@1..K plus the per-truncation means."""

    per_query: tuple  # (query_id, (ndcg@1, ..., ndcg@K)) per query
    means: np.ndarray
    truncation: int


@dataclass(frozen=True)
class FoldReport:
    per_fold: tuple  # one means vector per fold
    grand_mean: np.ndarray
    truncation: int


def evaluate(
    theta: np.ndarray,
    dataset: Dataset,
    truncation: int = 5,
    exclude_all_irrelevant: bool = False,
) -> EvalReport:
    """Rank every full document group by score and compute NDCG@1..K.

    All-irrelevant queries score 0 at every truncation and count toward
    the means unless ``exclude_all_irrelevant`` is set.
    """
    from .rankspace import ndcg_at_k

    if truncation < 1:
        raise ContractError(f"truncation must be >= 1, got {truncation}")
    if len(dataset) == 0:
        raise ContractError("cannot evaluate an empty dataset")
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (dataset.feature_dim,):
        raise DimensionError(
            f"theta dimension {theta.shape} does not match dataset dimension {dataset.feature_dim}"
        )

    per_query = []
    for group in dataset:
        if exclude_all_irrelevant and not np.any(group.relevance > 0):
            continue
        y = predict(score(theta, group))
        row = tuple(ndcg_at_k(y, group.relevance, k) for k in range(1, truncation + 1))
        per_query.append((group.query_id, row))
    if not per_query:
        raise ContractError("no queries left to evaluate after exclusion")

    means = np.array([r for _, r in per_query], dtype=np.float64).mean(axis=0)
    return EvalReport(per_query=tuple(per_query), means=means, truncation=truncation)


def evaluate_folds(models, folds, truncation: int = 5) -> FoldReport:
    """Evaluate each model on its fold's test set and average the means."""
    if len(models) != len(folds):
        raise ContractError(f"{len(models)} models for {len(folds)} folds")
    per_fold = []
    for theta, fold in zip(models, folds):
        if len(fold.test) == 0:
            raise ContractError(f"fold {fold.fold_index} has an empty test set")
        per_fold.append(evaluate(theta, fold.test, truncation=truncation).means)
    return FoldReport(
        per_fold=tuple(per_fold),
        grand_mean=np.mean(per_fold, axis=0),
        truncation=truncation,
    )


def write_means_csv(path, report: EvalReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "ndcg"])
        for k, v in enumerate(report.means, start=1):
            writer.writerow([k, repr(float(v))])


def write_per_query_csv(path, report: EvalReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["qid"] + [f"ndcg@{k}" for k in range(1, report.truncation + 1)])
        for qid, row in report.per_query:
            writer.writerow([qid] + [repr(float(v)) for v in row])


def write_fold_report_csv(path, report: FoldReport) -> None:
    """Fold-by-fold NDCG@1..K table with a grand-mean row."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold"] + [f"ndcg@{k}" for k in range(1, report.truncation + 1)])
        for i, means in enumerate(report.per_fold, start=1):
            writer.writerow([i] + [repr(float(v)) for v in means])
        writer.writerow(["mean"] + [repr(float(v)) for v in report.grand_mean])


def read_means_csv(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return np.array([float(v) for _, v in rows[1:]])
