"""LETOR / SVMrank file parsing and fold management.

Line grammar::

    <grade> qid:<id> <idx>:<val> <idx>:<val> ... [# comment]

Grades are non-negative integers, feature indices are 1-based in files
and 0-based internally, missing indices densify to 0.0.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import ContractError, DimensionError, LetorParseError


@dataclass(frozen=True)
class QueryGroup:
    """All documents retrieved for one query.

    feature_matrix has one row per document; relevance holds the integer
    grade of each document in the same order.
    """

    query_id: str
    feature_matrix: np.ndarray
    relevance: np.ndarray

    def __post_init__(self):
        if self.feature_matrix.ndim != 2:
            raise ContractError("feature_matrix must be 2-D")
        if len(self.relevance) != self.feature_matrix.shape[0]:
            raise ContractError("relevance length must match document count")
        if self.feature_matrix.shape[0] < 1:
            raise ContractError("a query group needs at least one document")

    @property
    def num_docs(self) -> int:
        return self.feature_matrix.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.feature_matrix.shape[1]


@dataclass(frozen=True)
class Dataset:
    groups: tuple
    feature_dim: int

    def __len__(self) -> int:
        return len(self.groups)

    def __iter__(self) -> Iterator[QueryGroup]:
        return iter(self.groups)


@dataclass(frozen=True)
class FoldSplit:
    train: Dataset
    validation: Dataset
    test: Dataset
    fold_index: int = 1


def distinct_relevance_levels(group: QueryGroup) -> set:
    """Set of relevance grades present in a group."""
    return set(int(v) for v in group.relevance)


TextSource = Union[str, IO[str], Iterable[str]]


def _iter_lines(text: TextSource) -> Iterable[str]:
    if isinstance(text, str):
        return text.splitlines()
    return text


def parse_letor(text: TextSource, expected_dim: Optional[int] = None) -> Dataset:
    """Parse LETOR lines into per-query groups.

    Queries keep first-appearance order; documents keep line order.
    Blank lines and lines starting with '#' are skipped.  The feature
    dimension is ``expected_dim`` when given, otherwise the maximum
    feature index seen.
    """
    rows_by_qid: dict = {}
    max_index = 0

    for lineno, raw in enumerate(_iter_lines(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "#" in line:
            line = line.split("#", 1)[0].rstrip()
        tokens = line.split()
        if len(tokens) < 2:
            raise LetorParseError("expected '<grade> qid:<id> ...'", lineno)
        try:
            grade = int(tokens[0])
        except ValueError:
            raise LetorParseError(f"non-integer grade {tokens[0]!r}", lineno) from None
        if grade < 0:
            raise LetorParseError(f"negative grade {grade}", lineno)
        if not tokens[1].startswith("qid:") or len(tokens[1]) <= 4:
            raise LetorParseError(f"missing qid token, got {tokens[1]!r}", lineno)
        qid = tokens[1][4:]

        pairs = []
        for tok in tokens[2:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise LetorParseError(f"malformed feature token {tok!r}", lineno)
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise LetorParseError(f"non-numeric feature token {tok!r}", lineno) from None
            if idx < 1:
                raise LetorParseError(f"feature index {idx} < 1", lineno)
            if expected_dim is not None and idx > expected_dim:
                raise DimensionError(
                    f"line {lineno}: feature index {idx} exceeds expected dimension {expected_dim}"
                )
            max_index = max(max_index, idx)
            pairs.append((idx, val))

        rows_by_qid.setdefault(qid, []).append((grade, pairs))

    dim = expected_dim if expected_dim is not None else max_index

    groups = []
    for qid, rows in rows_by_qid.items():
        feats = np.zeros((len(rows), dim), dtype=np.float64)
        rel = np.empty(len(rows), dtype=np.int64)
        for i, (grade, pairs) in enumerate(rows):
            rel[i] = grade
            for idx, val in pairs:
                feats[i, idx - 1] = val
        groups.append(QueryGroup(query_id=qid, feature_matrix=feats, relevance=rel))

    return Dataset(groups=tuple(groups), feature_dim=dim)


def to_letor_lines(dataset: Dataset) -> list:
    """Serialize a Dataset back to LETOR lines at full float precision."""
    lines = []
    for group in dataset:
        for i in range(group.num_docs):
            feats = " ".join(
                f"{j + 1}:{float(group.feature_matrix[i, j])!r}" for j in range(dataset.feature_dim)
            )
            lines.append(f"{int(group.relevance[i])} qid:{group.query_id} {feats}")
    return lines


def validate_grades(dataset: Dataset, allowed: Sequence[int] = (0, 1, 2)) -> list:
    """Return (query_id, grade) pairs whose grade lies outside ``allowed``."""
    allowed_set = set(allowed)
    bad = []
    for group in dataset:
        for grade in group.relevance:
            if int(grade) not in allowed_set:
                bad.append((group.query_id, int(grade)))
    return bad


def minmax_normalize(dataset: Dataset) -> Dataset:
    """Per-query min-max feature normalization (optional; off by default)."""
    groups = []
    for group in dataset:
        feats = group.feature_matrix
        lo = feats.min(axis=0)
        span = feats.max(axis=0) - lo
        span[span == 0.0] = 1.0
        groups.append(
            QueryGroup(
                query_id=group.query_id,
                feature_matrix=(feats - lo) / span,
                relevance=group.relevance,
            )
        )
    return Dataset(groups=tuple(groups), feature_dim=dataset.feature_dim)


def _parse_file(path: Union[str, os.PathLike], expected_dim: Optional[int]) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_letor(fh, expected_dim=expected_dim)


def load_fold(
    train_path,
    validation_path,
    test_path,
    fold_index: int = 1,
    expected_dim: Optional[int] = None,
) -> FoldSplit:
    """Load one train/validation/test triple, checking dimensions agree.

    Without ``expected_dim`` each file's intrinsic dimension (its maximum
    feature index) must match across the non-empty partitions.
    """
    train = _parse_file(train_path, expected_dim)
    validation = _parse_file(validation_path, expected_dim)
    test = _parse_file(test_path, expected_dim)

    dims = {d.feature_dim for d in (train, validation, test) if len(d) > 0}
    if len(dims) > 1:
        raise DimensionError(f"feature dimensions differ across fold files: {sorted(dims)}")
    dim = dims.pop() if dims else (expected_dim or 0)

    def _with_dim(ds: Dataset) -> Dataset:
        # only empty partitions can disagree at this point
        if len(ds) == 0 and ds.feature_dim != dim:
            return Dataset((), dim)
        return ds

    return FoldSplit(
        train=_with_dim(train),
        validation=_with_dim(validation),
        test=_with_dim(test),
        fold_index=fold_index,
    )


def fold_paths(root, k: int) -> tuple:
    """Conventional `Fold<k>/{train,vali,test}.txt` paths under ``root``."""
    base = os.path.join(os.fspath(root), f"Fold{k}")
    return (
        os.path.join(base, "train.txt"),
        os.path.join(base, "vali.txt"),
        os.path.join(base, "test.txt"),
    )


def load_fold_dir(root, k: int, expected_dim: Optional[int] = None) -> FoldSplit:
    train_p, vali_p, test_p = fold_paths(root, k)
    return load_fold(train_p, vali_p, test_p, fold_index=k, expected_dim=expected_dim)
