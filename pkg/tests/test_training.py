import numpy as np
import pytest

from crfrank import (
    ContractError,
    Dataset,
    FoldSplit,
    ObjectiveSpec,
    SweepGrid,
    TrainConfig,
    distinct_relevance_levels,
    evaluate,
    objective_eval,
    sgd_train,
    subsample_group,
    sweep,
)
from conftest import make_group, synthetic_dataset


class TestSubsample:
    def test_small_group_unchanged(self, rng):
        g = make_group(rng, 5, 3)
        assert subsample_group(g, 6, np.random.default_rng(0)) is g

    def test_covers_all_levels(self, rng):
        g = make_group(rng, 10, 3, relevance=[0, 0, 0, 0, 1, 1, 1, 2, 2, 2])
        for seed in range(20):
            sub = subsample_group(g, 6, np.random.default_rng(seed))
            assert sub.num_docs == 6
            assert distinct_relevance_levels(sub) == {0, 1, 2}

    def test_deterministic_given_seed(self, rng):
        g = make_group(rng, 12, 3)
        a = subsample_group(g, 6, np.random.default_rng(7))
        b = subsample_group(g, 6, np.random.default_rng(7))
        np.testing.assert_array_equal(a.feature_matrix, b.feature_matrix)
        np.testing.assert_array_equal(a.relevance, b.relevance)

    def test_keeps_document_order(self, rng):
        g = make_group(rng, 10, 1)
        sub = subsample_group(g, 6, np.random.default_rng(3))
        # selected rows appear in original order: features are a subsequence
        original = [tuple(row) for row in g.feature_matrix]
        picked = [tuple(row) for row in sub.feature_matrix]
        positions = [original.index(row) for row in picked]
        assert positions == sorted(positions)

    def test_too_many_levels(self, rng):
        g = make_group(rng, 8, 2, relevance=[0, 1, 2, 3, 4, 5, 6, 7])
        with pytest.raises(ContractError):
            subsample_group(g, 3, np.random.default_rng(0))


class TestSgdTrain:
    def test_zero_epochs_returns_zero_theta(self, rng):
        ds = synthetic_dataset(5, 4, 3, rng.standard_normal(3), seed=1)
        config = TrainConfig(objective=ObjectiveSpec(kind="ml"), epochs=0)
        theta, history = sgd_train(ds, config)
        np.testing.assert_array_equal(theta, np.zeros(3))
        assert history == []

    def test_single_step_is_lr_times_grad(self, rng):
        ds = synthetic_dataset(1, 4, 3, rng.standard_normal(3), seed=2)
        spec = ObjectiveSpec(kind="kl")
        config = TrainConfig(objective=spec, learning_rate=0.25, epochs=1, shuffle_queries=False)
        theta, _ = sgd_train(ds, config)
        expected = -0.25 * objective_eval(spec, ds.groups[0], np.zeros(3)).grad
        np.testing.assert_allclose(theta, expected, atol=1e-15)

    def test_deterministic_trajectory(self, rng):
        ds = synthetic_dataset(10, 8, 4, rng.standard_normal(4), seed=3)
        config = TrainConfig(objective=ObjectiveSpec(kind="ml"), epochs=3, seed=42)
        t1, h1 = sgd_train(ds, config)
        t2, h2 = sgd_train(ds, config)
        np.testing.assert_array_equal(t1, t2)
        assert [s.mean_objective for s in h1] == [s.mean_objective for s in h2]

    def test_skips_zero_signal_queries(self, rng):
        groups = [
            make_group(rng, 3, 2, relevance=[0, 0, 0], qid="dead"),
            make_group(rng, 3, 2, relevance=[1, 1, 1], qid="tied"),
            make_group(rng, 3, 2, relevance=[2, 1, 0], qid="live"),
        ]
        ds = Dataset(tuple(groups), 2)
        config = TrainConfig(objective=ObjectiveSpec(kind="ml"), epochs=1)
        theta, _ = sgd_train(ds, config)  # would raise on the all-zero query otherwise
        assert np.any(theta != 0.0)

    def test_training_improves_ndcg(self, rng):
        theta_star = rng.standard_normal(4)
        ds = synthetic_dataset(40, 8, 4, theta_star, seed=5)
        config = TrainConfig(objective=ObjectiveSpec(kind="ml"), learning_rate=0.1, epochs=15, seed=0)
        theta, history = sgd_train(ds, config)
        assert history[-1].mean_train_ndcg5 > history[0].mean_train_ndcg5
        assert history[-1].mean_train_ndcg5 >= 0.9

    def test_empty_dataset(self):
        with pytest.raises(ContractError):
            sgd_train(Dataset((), 3), TrainConfig(objective=ObjectiveSpec(kind="ml")))


class TestSweep:
    @staticmethod
    def _fold(rng, theta_star):
        return FoldSplit(
            train=synthetic_dataset(20, 6, 3, theta_star, seed=10),
            validation=synthetic_dataset(8, 6, 3, theta_star, seed=11),
            test=synthetic_dataset(8, 6, 3, theta_star, seed=12),
        )

    def test_single_point_grid(self, rng):
        fold = self._fold(rng, rng.standard_normal(3))
        grid = SweepGrid(learning_rates=(0.1,))
        result = sweep(fold, grid, "ml", epochs=3)
        assert result.best_config.learning_rate == 0.1
        assert len(result.records) == 1

    def test_ml_grid_size(self, rng):
        fold = self._fold(rng, rng.standard_normal(3))
        grid = SweepGrid(learning_rates=(0.5, 0.1, 0.01))
        result = sweep(fold, grid, "ml", epochs=2)
        assert len(result.records) == 3

    def test_kl_grid_is_cartesian(self, rng):
        fold = self._fold(rng, rng.standard_normal(3))
        grid = SweepGrid(learning_rates=(0.1, 0.01), temperatures=(1.0, 10.0))
        result = sweep(fold, grid, "kl", epochs=2)
        assert len(result.records) == 4
        assert result.best_score == max(s for _, s in result.records)

    def test_la_grid_uses_alpha(self, rng):
        fold = self._fold(rng, rng.standard_normal(3))
        grid = SweepGrid(learning_rates=(0.1,), la_weights=(1.0, 10.0))
        result = sweep(fold, grid, "la", epochs=2)
        assert {c.objective.la_weight for c, _ in result.records} == {1.0, 10.0}

    def test_best_beats_validation_of_others(self, rng):
        fold = self._fold(rng, rng.standard_normal(3))
        grid = SweepGrid(learning_rates=(0.5, 0.001))
        result = sweep(fold, grid, "ml", epochs=3)
        report = evaluate(result.best_theta, fold.validation, truncation=5)
        assert float(np.mean(report.means)) == pytest.approx(result.best_score)
