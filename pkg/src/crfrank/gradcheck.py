"""Finite-difference audit of the analytic objective gradients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .letor import QueryGroup
from .objectives import OBJECTIVE_KINDS, ObjectiveSpec, objective_eval


def random_instance(rng: np.random.Generator, m: int = None, d: int = 4):
    """Random (group, theta) with at least one relevant document."""
    if m is None:
        m = int(rng.integers(2, 6))
    while True:
        relevance = rng.integers(0, 3, size=m)
        if relevance.max() > 0:
            break
    group = QueryGroup(
        query_id="synthetic",
        feature_matrix=rng.standard_normal((m, d)),
        relevance=relevance,
    )
    return group, rng.standard_normal(d)


def finite_difference_grad(spec: ObjectiveSpec, group: QueryGroup, theta: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central differences of the per-query objective value."""
    grad = np.empty_like(theta)
    probe = theta.copy()
    for j in range(len(theta)):
        orig = probe[j]
        probe[j] = orig + step
        hi = objective_eval(spec, group, probe).value
        probe[j] = orig - step
        lo = objective_eval(spec, group, probe).value
        probe[j] = orig
        grad[j] = (hi - lo) / (2.0 * step)
    return grad


def relative_grad_error(spec: ObjectiveSpec, group: QueryGroup, theta: np.ndarray, step: float = 1e-5) -> float:
    """||analytic - finite difference|| / max(||finite difference||, eps)."""
    analytic = objective_eval(spec, group, theta).grad
    numeric = finite_difference_grad(spec, group, theta, step=step)
    return float(np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-12))


@dataclass(frozen=True)
class AuditRow:
    kind: str
    trials: int
    max_relative_error: float
    passed: bool


def audit_gradients(
    trials: int = 20,
    seed: int = 0,
    d: int = 4,
    tolerance: float = 1e-4,
    kinds=OBJECTIVE_KINDS,
) -> list:
    """Run the finite-difference audit for each objective kind."""
    rows = []
    for kind in kinds:
        spec = ObjectiveSpec(kind=kind)
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(trials):
            group, theta = random_instance(rng, d=d)
            worst = max(worst, relative_grad_error(spec, group, theta))
        rows.append(AuditRow(kind=kind, trials=trials, max_relative_error=worst, passed=worst < tolerance))
    return rows
