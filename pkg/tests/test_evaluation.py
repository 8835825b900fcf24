import numpy as np
import pytest

from crfrank import (
    ContractError,
    Dataset,
    DimensionError,
    FoldSplit,
    QueryGroup,
    evaluate,
    evaluate_folds,
    ndcg,
)
from crfrank.evaluation import read_means_csv, write_means_csv
from conftest import make_group, synthetic_dataset


def ideal_dataset(rng, n=4):
    """Feature 0 equals the relevance grade, so theta=[1,0] ranks ideally."""
    groups = []
    for i in range(n):
        r = rng.integers(0, 3, size=5)
        r[0] = 2
        X = np.column_stack([r.astype(float), rng.standard_normal(5)])
        groups.append(QueryGroup(f"q{i}", X, r.astype(np.int64)))
    return Dataset(tuple(groups), 2)


class TestEvaluate:
    def test_ideal_model_scores_one(self, rng):
        ds = ideal_dataset(rng)
        report = evaluate(np.array([1.0, 0.0]), ds, truncation=5)
        np.testing.assert_allclose(report.means, 1.0)

    def test_zero_theta_is_identity_ranking(self, rng):
        ds = ideal_dataset(rng, n=3)
        report = evaluate(np.zeros(2), ds, truncation=5)
        for (qid, row), group in zip(report.per_query, ds):
            m = group.num_docs
            expected = ndcg(np.arange(1, m + 1), group.relevance)
            assert row[-1] == pytest.approx(expected, abs=1e-12)

    def test_three_doc_example(self):
        g = QueryGroup("q", np.array([[0.1], [0.9], [0.5]]), np.array([2, 1, 0]))
        report = evaluate(np.array([1.0]), Dataset((g,), 1), truncation=3)
        assert report.per_query[0][1][0] == pytest.approx(0.5)

    def test_all_irrelevant_counts_as_zero(self, rng):
        groups = (
            make_group(rng, 3, 2, relevance=[0, 0, 0], qid="dead"),
            make_group(rng, 3, 2, relevance=[2, 1, 0], qid="live"),
        )
        ds = Dataset(groups, 2)
        with_dead = evaluate(np.zeros(2), ds, truncation=3)
        without = evaluate(np.zeros(2), ds, truncation=3, exclude_all_irrelevant=True)
        assert len(with_dead.per_query) == 2
        assert len(without.per_query) == 1
        np.testing.assert_allclose(
            with_dead.means, np.asarray(without.means) / 2.0, atol=1e-12
        )

    def test_dimension_mismatch(self, rng):
        ds = ideal_dataset(rng)
        with pytest.raises(DimensionError):
            evaluate(np.zeros(5), ds)

    def test_empty_dataset(self):
        with pytest.raises(ContractError):
            evaluate(np.zeros(2), Dataset((), 2))

    def test_repeat_evaluation_identical(self, rng):
        ds = synthetic_dataset(6, 7, 3, rng.standard_normal(3), seed=9)
        theta = rng.standard_normal(3)
        a = evaluate(theta, ds)
        b = evaluate(theta, ds)
        np.testing.assert_array_equal(a.means, b.means)
        assert a.per_query == b.per_query

    def test_means_in_unit_interval(self, rng):
        ds = synthetic_dataset(6, 7, 3, rng.standard_normal(3), seed=9)
        report = evaluate(rng.standard_normal(3), ds, truncation=7)
        assert np.all(report.means >= 0.0) and np.all(report.means <= 1.0)


class TestEvaluateFolds:
    @staticmethod
    def _fold(rng, k):
        ds = synthetic_dataset(4, 5, 3, rng.standard_normal(3), seed=k)
        return FoldSplit(train=ds, validation=ds, test=ds, fold_index=k)

    def test_identical_folds_degenerate(self, rng):
        fold = self._fold(rng, 1)
        theta = rng.standard_normal(3)
        report = evaluate_folds([theta] * 5, [fold] * 5, truncation=5)
        np.testing.assert_allclose(report.grand_mean, report.per_fold[0])

    def test_grand_mean_arithmetic(self, rng):
        folds = [self._fold(rng, k) for k in range(1, 4)]
        thetas = [rng.standard_normal(3) for _ in range(3)]
        report = evaluate_folds(thetas, folds, truncation=5)
        np.testing.assert_allclose(report.grand_mean, np.mean(report.per_fold, axis=0))

    def test_count_mismatch(self, rng):
        fold = self._fold(rng, 1)
        with pytest.raises(ContractError):
            evaluate_folds([np.zeros(3)], [fold, fold])

    def test_empty_test_set(self, rng):
        fold = FoldSplit(
            train=self._fold(rng, 1).train,
            validation=self._fold(rng, 1).validation,
            test=Dataset((), 3),
        )
        with pytest.raises(ContractError):
            evaluate_folds([np.zeros(3)], [fold])


class TestCsv:
    def test_means_round_trip(self, tmp_path, rng):
        ds = synthetic_dataset(5, 6, 3, rng.standard_normal(3), seed=4)
        report = evaluate(rng.standard_normal(3), ds, truncation=5)
        path = tmp_path / "means.csv"
        write_means_csv(path, report)
        recovered = read_means_csv(path)
        np.testing.assert_allclose(recovered, report.means, atol=1e-12)
