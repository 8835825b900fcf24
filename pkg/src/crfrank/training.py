"""Per-query SGD with stratified subsampling, plus hyperparameter sweeps.

Training iterates over queries (optionally shuffled) and takes one
gradient step per query on the exact enumerated objective.  Groups
larger than ``max_group_size`` are subsampled to that size while keeping
at least one document of every relevance level present in the group.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .letor import Dataset, FoldSplit, QueryGroup, distinct_relevance_levels
from .objectives import ObjectiveSpec, objective_eval
from .rankspace import PERMUTATION_CAP

DEFAULT_LEARNING_RATES = (0.5, 0.1, 0.01, 0.001)
DEFAULT_LA_WEIGHTS = (1.0, 10.0, 20.0, 50.0)
DEFAULT_TEMPERATURES = (1.0, 10.0, 20.0, 50.0)


@dataclass(frozen=True)
class TrainConfig:
    objective: ObjectiveSpec
    learning_rate: float = 0.1
    epochs: int = 50
    max_group_size: int = 6
    seed: int = 0
    shuffle_queries: bool = True
    skip_zero_signal_queries: bool = True
    weight_decay: float = 0.0

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise ContractError("learning_rate must be > 0")
        if self.epochs < 0:
            raise ContractError("epochs must be >= 0")
        if not 2 <= self.max_group_size <= PERMUTATION_CAP:
            raise ContractError(
                f"max_group_size must lie in [2, {PERMUTATION_CAP}], got {self.max_group_size}"
            )


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    mean_objective: float
    mean_train_ndcg5: float
    wall_seconds: float


def subsample_group(group: QueryGroup, max_size: int, rng: np.random.Generator) -> QueryGroup:
    """Uniformly subsample to ``max_size`` docs, covering every relevance level.

    One document per distinct level is drawn first, then the remaining
    slots fill uniformly without replacement.  Selected documents keep
    their original order.  Groups at or under the limit pass through.
    """
    m = group.num_docs
    if m <= max_size:
        return group
    levels = sorted(distinct_relevance_levels(group))
    if max_size < len(levels):
        raise ContractError(
            f"max_size {max_size} cannot cover {len(levels)} distinct relevance levels"
        )
    chosen = []
    for level in levels:
        candidates = np.flatnonzero(group.relevance == level)
        chosen.append(rng.choice(candidates))
    chosen = set(int(i) for i in chosen)
    rest = np.array([i for i in range(m) if i not in chosen])
    fill = rng.choice(rest, size=max_size - len(chosen), replace=False)
    idx = np.array(sorted(chosen | set(int(i) for i in fill)))
    return QueryGroup(
        query_id=group.query_id,
        feature_matrix=group.feature_matrix[idx],
        relevance=group.relevance[idx],
    )


def _train_ndcg5(theta: np.ndarray, dataset: Dataset) -> float:
    from .evaluation import evaluate

    return float(evaluate(theta, dataset, truncation=5).means[4])


def sgd_train(dataset: Dataset, config: TrainConfig):
    """Run SGD from theta = 0; returns (theta, per-epoch stats).

    Queries with fewer than two distinct relevance levels carry no
    ranking signal and are skipped when skip_zero_signal_queries is on.
    A single seeded RNG stream drives shuffling and subsampling, so the
    trajectory is fully determined by (dataset, config).
    """
    if len(dataset) == 0:
        raise ContractError("cannot train on an empty dataset")
    rng = np.random.default_rng(config.seed)
    theta = np.zeros(dataset.feature_dim)
    history = []

    for epoch in range(1, config.epochs + 1):
        start = time.perf_counter()
        order = rng.permutation(len(dataset)) if config.shuffle_queries else np.arange(len(dataset))
        values = []
        for qi in order:
            group = dataset.groups[qi]
            if config.skip_zero_signal_queries and len(distinct_relevance_levels(group)) < 2:
                continue
            sub = subsample_group(group, config.max_group_size, rng)
            ev = objective_eval(config.objective, sub, theta)
            if not np.all(np.isfinite(ev.grad)) or not np.isfinite(ev.value):
                raise ContractError(
                    f"non-finite gradient on query {group.query_id!r} at epoch {epoch}"
                )
            if config.weight_decay > 0.0:
                theta *= 1.0 - config.learning_rate * config.weight_decay
            theta -= config.learning_rate * ev.grad
            values.append(ev.value)
        history.append(
            EpochStats(
                epoch=epoch,
                mean_objective=float(np.mean(values)) if values else float("nan"),
                mean_train_ndcg5=_train_ndcg5(theta, dataset),
                wall_seconds=time.perf_counter() - start,
            )
        )
    return theta, history


def write_training_log(path, history) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_objective", "mean_train_ndcg@5", "wall_seconds"])
        for st in history:
            writer.writerow([st.epoch, repr(st.mean_objective), repr(st.mean_train_ndcg5), repr(st.wall_seconds)])


@dataclass(frozen=True)
class SweepGrid:
    learning_rates: tuple = DEFAULT_LEARNING_RATES
    la_weights: tuple = DEFAULT_LA_WEIGHTS
    temperatures: tuple = DEFAULT_TEMPERATURES
    selection_k: int = None  # None = mean of NDCG@1..5 on validation

    def __post_init__(self):
        if not self.learning_rates or not self.la_weights or not self.temperatures:
            raise ContractError("sweep grids must be non-empty")

    def points(self, kind: str):
        """(learning_rate, spec) pairs in grid order."""
        for lr in self.learning_rates:
            if kind == "la":
                for a in self.la_weights:
                    yield lr, ObjectiveSpec(kind="la", la_weight=a)
            elif kind == "kl":
                for t in self.temperatures:
                    yield lr, ObjectiveSpec(kind="kl", temperature=t)
            else:
                yield lr, ObjectiveSpec(kind=kind)


@dataclass(frozen=True)
class SweepResult:
    best_config: TrainConfig
    best_theta: np.ndarray
    best_score: float
    records: tuple  # (config, validation score) per grid point


def sweep(
    fold: FoldSplit,
    grid: SweepGrid,
    objective_kind: str,
    epochs: int = 50,
    seed: int = 0,
    max_group_size: int = 6,
) -> SweepResult:
    """Train one model per grid point, select by validation NDCG.

    Each grid point gets a seed derived from its position so results do
    not depend on execution order.  Ties keep the earlier grid point.
    """
    from .evaluation import evaluate

    best = None
    records = []
    for i, (lr, spec) in enumerate(grid.points(objective_kind)):
        config = TrainConfig(
            objective=spec,
            learning_rate=lr,
            epochs=epochs,
            max_group_size=max_group_size,
            seed=seed + i,
        )
        theta, _ = sgd_train(fold.train, config)
        report = evaluate(theta, fold.validation, truncation=5)
        if grid.selection_k is None:
            score = float(np.mean(report.means))
        else:
            score = float(report.means[grid.selection_k - 1])
        records.append((config, score))
        if best is None or score > best[2]:
            best = (config, theta, score)

    return SweepResult(
        best_config=best[0], best_theta=best[1], best_score=best[2], records=tuple(records)
    )
