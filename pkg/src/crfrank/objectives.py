"""Exact per-query training objectives over an enumerated permutation space.

Five objectives are supported:

* ML -- maximum likelihood summed over all zero-loss rankings.
* LA -- likelihood with a loss-augmented energy E - alpha * loss.
* LS -- likelihood with a loss-scaled energy loss * (E - mean ground-truth
  energy) - loss.
* EL -- expected loss under the model distribution.
* KL -- cross-entropy between a temperature-smoothed loss-derived target
  distribution and the model distribution (KL divergence up to a
  parameter-free entropy constant, reported in diagnostics).

Every value/gradient is an exact sum over all permutations of the
(possibly subsampled) document group; probabilities go through
log-sum-exp / softmax with max-subtraction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, softmax

from .errors import ContractError
from .letor import QueryGroup
from .model import position_weights, score
from .rankspace import (
    enumerate_permutations,
    loss_table,
    target_distribution,
    zero_loss_set,
)

OBJECTIVE_KINDS = ("ml", "la", "ls", "el", "kl")


@dataclass(frozen=True)
class ObjectiveSpec:
    """Which objective to train, plus its hyperparameters."""

    kind: str
    la_weight: float = 1.0
    temperature: float = 1.0

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise ContractError(f"unknown objective kind {self.kind!r}")
        if self.la_weight <= 0.0:
            raise ContractError("la_weight must be > 0")
        if self.temperature <= 0.0:
            raise ContractError("temperature must be > 0")


@dataclass(frozen=True)
class QueryEnumeration:
    """Cached exact enumeration of one group's permutation space.

    ``weights[j, i]`` is the position weight alpha[y_i] of document i
    under permutation j, so energies = -weights @ scores and any
    weighted sum of energy gradients reduces to a single matrix product
    with the feature matrix.
    """

    group: QueryGroup
    perms: np.ndarray
    weights: np.ndarray
    energies: np.ndarray
    losses: np.ndarray
    zero_loss: np.ndarray

    def grad_combination(self, coeffs: np.ndarray) -> np.ndarray:
        """sum_j coeffs[j] * dE_j/dtheta, as a d-vector."""
        return -((coeffs @ self.weights) @ self.group.feature_matrix)


_weights_cache: dict = {}


def _perm_weights(m: int) -> np.ndarray:
    if m not in _weights_cache:
        perms = enumerate_permutations(m)
        w = position_weights(m)[perms - 1]
        w.setflags(write=False)
        _weights_cache[m] = w
    return _weights_cache[m]


def build_enumeration(group: QueryGroup, theta: np.ndarray) -> QueryEnumeration:
    """Enumerate the group's permutations with energies and losses.

    Raises CapacityError for groups above the enumeration cap and
    ContractError when no permutation has zero loss (all-irrelevant
    queries; these carry no ranking signal).
    """
    m = group.num_docs
    perms = enumerate_permutations(m)
    weights = _perm_weights(m)
    scores = score(theta, group)
    energies = -(weights @ scores)
    losses = loss_table(perms, group.relevance)
    zero_loss = zero_loss_set(group.relevance, perms)
    if zero_loss.size == 0:
        raise ContractError(
            f"query {group.query_id!r} has no zero-loss permutation "
            "(all documents irrelevant); exclude it from training"
        )
    return QueryEnumeration(
        group=group,
        perms=perms,
        weights=weights,
        energies=energies,
        losses=losses,
        zero_loss=zero_loss,
    )


@dataclass(frozen=True)
class ObjectiveEval:
    value: float
    grad: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def ml_eval(enum: QueryEnumeration) -> ObjectiveEval:
    """Summed negative log-likelihood of every zero-loss ranking."""
    e = enum.energies
    gt = enum.zero_loss
    log_z = logsumexp(-e)
    p = softmax(-e)
    value = float(np.sum(e[gt]) + gt.size * log_z)
    coeffs = -gt.size * p
    coeffs[gt] += 1.0
    return ObjectiveEval(value=value, grad=enum.grad_combination(coeffs))


def la_eval(enum: QueryEnumeration, la_weight: float) -> ObjectiveEval:
    """ML form with the loss-augmented energy E - la_weight * loss.

    The ground-truth term is unchanged because zero-loss rankings have
    zero loss by construction.
    """
    if la_weight <= 0.0:
        raise ContractError("la_weight must be > 0")
    e_la = enum.energies - la_weight * enum.losses
    gt = enum.zero_loss
    log_z = logsumexp(-e_la)
    p = softmax(-e_la)
    value = float(np.sum(enum.energies[gt]) + gt.size * log_z)
    coeffs = -gt.size * p
    coeffs[gt] += 1.0
    return ObjectiveEval(value=value, grad=enum.grad_combination(coeffs))


def ls_eval(enum: QueryEnumeration) -> ObjectiveEval:
    """Log-partition of the loss-scaled energy.

    The scaled energy is loss * (E - mean energy over the zero-loss set)
    - loss; it vanishes on every zero-loss ranking, so the ground-truth
    term of the ML form drops out identically (value and gradient).
    """
    e = enum.energies
    l = enum.losses
    gt = enum.zero_loss
    e_ls = l * (e - e[gt].mean()) - l
    p = softmax(-e_ls)
    value = float(logsumexp(-e_ls))
    pl = p * l
    coeffs = np.zeros_like(pl)
    coeffs[gt] = pl.sum() / gt.size
    coeffs -= pl
    # grad = -sum_j p_j * dE_ls_j/dtheta with
    # dE_ls_j/dtheta = l_j * (dE_j/dtheta - mean_gt dE/dtheta)
    return ObjectiveEval(value=value, grad=enum.grad_combination(coeffs))


def el_eval(enum: QueryEnumeration) -> ObjectiveEval:
    """Expected loss under the model distribution."""
    p = softmax(-enum.energies)
    l = enum.losses
    value = float(p @ l)
    coeffs = value * p - p * l
    return ObjectiveEval(value=value, grad=enum.grad_combination(coeffs))


def kl_eval(enum: QueryEnumeration, temperature: float) -> ObjectiveEval:
    """Cross-entropy between the loss-derived target and the model.

    Equals the KL divergence plus the target entropy, which is constant
    in theta; both are reported in diagnostics.
    """
    q = target_distribution(enum.losses, temperature)
    e = enum.energies
    log_z = logsumexp(-e)
    p = softmax(-e)
    value = float(q @ e + log_z)
    entropy = float(-np.sum(q * np.log(q)))
    grad = enum.grad_combination(q - p)
    return ObjectiveEval(
        value=value,
        grad=grad,
        diagnostics={"target_entropy": entropy, "kl_divergence": value - entropy},
    )


def objective_eval(
    spec: ObjectiveSpec,
    group: QueryGroup,
    theta: np.ndarray,
    enum: QueryEnumeration = None,
) -> ObjectiveEval:
    """Dispatch to the requested objective, enumerating the group once."""
    if enum is None:
        enum = build_enumeration(group, theta)
    if spec.kind == "ml":
        return ml_eval(enum)
    if spec.kind == "la":
        return la_eval(enum, spec.la_weight)
    if spec.kind == "ls":
        return ls_eval(enum)
    if spec.kind == "el":
        return el_eval(enum)
    return kl_eval(enum, spec.temperature)


def _free_energy_objective(spec: ObjectiveSpec, e: np.ndarray, losses: np.ndarray, gt: int) -> float:
    """Per-query objective with the energies treated as free variables."""
    if spec.kind == "ml":
        return float(e[gt] + logsumexp(-e))
    if spec.kind == "la":
        e_la = e - spec.la_weight * losses
        return float(e_la[gt] + logsumexp(-e_la))
    if spec.kind == "ls":
        e_ls = losses * (e - e[gt]) - losses
        return float(logsumexp(-e_ls))
    if spec.kind == "el":
        return float(softmax(-e) @ losses)
    q = target_distribution(losses, spec.temperature)
    return float(q @ e + logsumexp(-e))


def energy_derivatives(
    spec: ObjectiveSpec,
    energies,
    losses,
    gt_index: int,
    step: float = 1e-6,
) -> np.ndarray:
    """Normalized negative objective derivatives w.r.t. each energy.

    Treats the configuration energies as free variables (bypassing
    theta), differentiates the per-query objective by central finite
    differences, and returns the negated derivative vector scaled to
    unit l2 norm.  A positive component means the objective pushes that
    configuration's energy up.  ``gt_index`` is 0-based and must point
    at a zero-loss configuration.
    """
    e = np.asarray(energies, dtype=np.float64).copy()
    l = np.asarray(losses, dtype=np.float64)
    if e.shape != l.shape or e.ndim != 1 or e.size < 2:
        raise ContractError("energies and losses must be equal-length vectors, n >= 2")
    if not 0 <= gt_index < e.size:
        raise ContractError(f"gt_index {gt_index} out of range for n={e.size}")
    if abs(l[gt_index]) > 0.0:
        raise ContractError(f"losses[{gt_index}] = {l[gt_index]} but the ground truth must have zero loss")

    v = np.empty_like(e)
    for j in range(e.size):
        orig = e[j]
        e[j] = orig + step
        hi = _free_energy_objective(spec, e, l, gt_index)
        e[j] = orig - step
        lo = _free_energy_objective(spec, e, l, gt_index)
        e[j] = orig
        v[j] = -(hi - lo) / (2.0 * step)

    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ContractError("degenerate all-zero derivative vector")
    return v / norm
