"""Shared fixtures and independent oracles for the test suite."""
import itertools
import math

import numpy as np
import pytest

from crfrank import Dataset, QueryGroup


def ndcg_oracle(ranks, relevance):
    """Plain-Python NDCG, independent of the library implementation."""
    def dcg(rs_at_rank):
        return sum(r * math.log(2) / math.log(1 + pos)
                   for pos, r in enumerate(rs_at_rank, start=1))

    by_rank = [None] * len(ranks)
    for doc, rank in enumerate(ranks):
        by_rank[rank - 1] = relevance[doc]
    ideal = dcg(sorted(relevance, reverse=True))
    if ideal == 0:
        return 0.0
    return dcg(by_rank) / ideal


def all_rankings(m):
    """Every rank vector of length m, lexicographic."""
    return [list(p) for p in itertools.permutations(range(1, m + 1))]


def make_group(rng, m, d, relevance=None, qid="q"):
    if relevance is None:
        while True:
            relevance = rng.integers(0, 3, size=m)
            if relevance.max() > 0:
                break
    return QueryGroup(query_id=qid,
                      feature_matrix=rng.standard_normal((m, d)),
                      relevance=np.asarray(relevance, dtype=np.int64))


def synthetic_dataset(n_queries, docs_per_query, dim, theta_star, seed):
    """Queries whose relevance is the 3-quantile bucketing of a hidden linear score."""
    rng = np.random.default_rng(seed)
    groups = []
    for i in range(n_queries):
        X = rng.standard_normal((docs_per_query, dim))
        s = X @ theta_star
        r = np.digitize(s, np.quantile(s, [1 / 3, 2 / 3]))
        groups.append(QueryGroup(f"q{i}", X, r.astype(np.int64)))
    return Dataset(tuple(groups), dim)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def write_letor_folds(root, theta_star, n_folds=5, n_train=8, n_vali=4, n_test=4,
                      docs_per_query=6, dim=None):
    """Materialize Fold1..FoldN directories of synthetic LETOR files."""
    from crfrank import to_letor_lines

    dim = dim if dim is not None else len(theta_star)
    seed = 0
    for k in range(1, n_folds + 1):
        fold_dir = root / f"Fold{k}"
        fold_dir.mkdir(parents=True, exist_ok=True)
        for name, n in (("train", n_train), ("vali", n_vali), ("test", n_test)):
            ds = synthetic_dataset(n, docs_per_query, dim, theta_star, seed=seed)
            seed += 1
            relabeled = Dataset(
                tuple(
                    QueryGroup(f"f{k}{name}{g.query_id}", g.feature_matrix, g.relevance)
                    for g in ds
                ),
                dim,
            )
            (fold_dir / f"{name}.txt").write_text("\n".join(to_letor_lines(relabeled)) + "\n")
