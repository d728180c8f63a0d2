"""Hybrid trainer: grid init, exact consequent solves, premise gradients, fit."""

from dataclasses import replace

import numpy as np
import pytest

from countermachine import (
    Dataset,
    RuleCapExceeded,
    SingularSystem,
    TrainConfig,
    fit,
    init_grid,
)
from countermachine.fuzzy import MembershipFunction, Rule, TskModel, dumps_model
from countermachine.training import (
    MIN_WIDTH,
    _premise_gradients,
    accuracy,
    lse_consequents,
    mean_squared_loss,
    predict_batch,
    premise_gradient_step,
)


def make_dataset(X, labels):
    X = np.asarray(X, dtype=np.float64)
    names = tuple(f"x{i}" for i in range(X.shape[1]))
    return Dataset(
        feature_names=names,
        X=X,
        labels=np.asarray(labels, dtype=np.int8),
        normalization_params={},
    )


def random_small_model(rng, n=None, m=None, n_rules=None):
    n = n or int(rng.integers(1, 4))
    m = m or int(rng.integers(1, 4))
    n_rules = n_rules or int(rng.integers(1, 9))
    mfs = tuple(
        tuple(
            MembershipFunction(float(rng.uniform(0, 1)), float(rng.uniform(0.1, 0.5)))
            for _ in range(m)
        )
        for _ in range(n)
    )
    rules = tuple(
        Rule(
            tuple(int(rng.integers(0, m)) for _ in range(n)),
            tuple(float(rng.uniform(-1, 1)) for _ in range(n + 1)),
        )
        for _ in range(n_rules)
    )
    return TskModel(tuple(f"x{i}" for i in range(n)), mfs, rules)


class TestInitGrid:
    def test_one_input_two_mfs(self):
        model = init_grid(1, ("x0",), TrainConfig(mfs_per_input=2))
        mfs = model.mfs_per_input[0]
        assert [mf.center for mf in mfs] == [0.0, 1.0]
        # width is half the center spacing: 1/(2*(m-1))
        assert all(mf.width == 0.5 for mf in mfs)
        assert model.n_rules == 2
        assert all(rule.coeffs == (0.0, 0.0) for rule in model.rules)

    def test_three_mfs_width_formula(self):
        model = init_grid(1, ("x0",), TrainConfig(mfs_per_input=3))
        mfs = model.mfs_per_input[0]
        assert [mf.center for mf in mfs] == [0.0, 0.5, 1.0]
        assert all(mf.width == 0.25 for mf in mfs)

    def test_seven_inputs_two_mfs_gives_128_rules(self):
        names = tuple(f"f{i}" for i in range(7))
        model = init_grid(7, names, TrainConfig(mfs_per_input=2))
        assert model.n_rules == 128

    def test_rule_cap(self):
        names = tuple(f"f{i}" for i in range(7))
        with pytest.raises(RuleCapExceeded):
            init_grid(7, names, TrainConfig(mfs_per_input=3))

    def test_single_mf_width(self):
        model = init_grid(2, ("a", "b"), TrainConfig(mfs_per_input=1))
        assert model.mfs_per_input[0][0].center == 0.5
        assert model.mfs_per_input[0][0].width == 0.5
        assert model.n_rules == 1


class TestLseConsequents:
    def test_hand_solved_normal_system(self):
        # 1 input, 1 rule: rows are [1, x] with x = 0, 0.5, 1 and targets
        # 0.2, 0.4, 0.9; the 2x2 normal equations give a0=0.15, a1=0.7
        model = init_grid(1, ("x0",), TrainConfig(mfs_per_input=1))
        ds = make_dataset([[0.0], [0.5], [1.0]], [0, 0, 1])
        ds = replace(ds, labels=ds.labels)  # labels unused below
        X = np.array([[0.0], [0.5], [1.0]])
        t = np.array([0.2, 0.4, 0.9])
        ds = Dataset(("x0",), X, t, {})  # targets passed through labels field
        fitted = lse_consequents(model, ds, ridge_lambda=0.0)
        assert fitted.rules[0].coeffs == pytest.approx((0.15, 0.7), abs=1e-12)

    def test_constant_rule_fits_mean(self):
        model = init_grid(1, ("x0",), TrainConfig(mfs_per_input=1))
        # zero out the linear term by construction: all inputs identical
        ds = Dataset(("x0",), np.full((5, 1), 0.5), np.full(5, 0.7), {})
        with pytest.raises(SingularSystem):
            # [1, 0.5] rows are collinear, so the unregularized system is singular
            lse_consequents(model, ds, ridge_lambda=0.0)
        fitted = lse_consequents(model, ds, ridge_lambda=1e-9)
        y = predict_batch(fitted, ds.X)
        np.testing.assert_allclose(y, 0.7, atol=1e-6)

    def test_recovers_realizable_targets(self, rng):
        # grid rules are distinct membership combos, so the system is regular
        base = init_grid(2, ("a", "b"), TrainConfig(mfs_per_input=2))
        model = replace(
            base,
            rules=tuple(Rule(r.mf_indices, tuple(rng.uniform(-1, 1, 3))) for r in base.rules),
        )
        X = rng.uniform(0, 1, (60, 2))
        t = predict_batch(model, X)
        ds = Dataset(model.feature_names, X, t, {})
        fitted = lse_consequents(base, ds, ridge_lambda=0.0)
        assert mean_squared_loss(fitted, ds) <= 1e-10

    def test_never_increases_loss_at_zero_ridge(self, rng):
        base = init_grid(2, ("a", "b"), TrainConfig(mfs_per_input=2))
        for _ in range(10):
            model = replace(
                base,
                rules=tuple(
                    Rule(r.mf_indices, tuple(rng.uniform(-1, 1, 3))) for r in base.rules
                ),
            )
            X = rng.uniform(0, 1, (40, 2))
            t = rng.uniform(0, 1, 40)
            ds = Dataset(model.feature_names, X, t, {})
            before = mean_squared_loss(model, ds)
            fitted = lse_consequents(model, ds, ridge_lambda=0.0)
            assert mean_squared_loss(fitted, ds) <= before + 1e-12

    def test_duplicate_rules_singular_at_zero_ridge(self, rng):
        # two rules sharing one membership combo make the columns collinear
        model = random_small_model(rng, n=1, m=1, n_rules=2)
        X = rng.uniform(0, 1, (30, 1))
        ds = Dataset(model.feature_names, X, rng.uniform(0, 1, 30), {})
        with pytest.raises(SingularSystem):
            lse_consequents(model, ds, ridge_lambda=0.0)
        lse_consequents(model, ds, ridge_lambda=1e-8)  # regularized never raises

    def test_premises_unchanged(self, rng):
        model = random_small_model(rng)
        X = rng.uniform(0, 1, (30, model.n_inputs))
        ds = Dataset(model.feature_names, X, rng.uniform(0, 1, 30), {})
        fitted = lse_consequents(model, ds, ridge_lambda=1e-6)
        assert fitted.mfs_per_input == model.mfs_per_input


class TestPremiseGradient:
    def test_zero_learning_rate_is_identity(self, rng):
        model = random_small_model(rng)
        X = rng.uniform(0, 1, (20, model.n_inputs))
        ds = Dataset(model.feature_names, X, rng.uniform(0, 1, 20), {})
        stepped = premise_gradient_step(model, ds, learning_rate=0.0)
        assert stepped.mfs_per_input == model.mfs_per_input
        assert stepped.rules == model.rules

    def test_matches_central_finite_differences(self, rng):
        h = 1e-6
        for _ in range(20):
            model = random_small_model(rng)
            X = rng.uniform(0, 1, (8, model.n_inputs))
            t = rng.uniform(0, 1, 8)
            dc, ds_grad = _premise_gradients(model, X, t)
            analytic = np.concatenate([dc, ds_grad])

            def loss_at(centers, widths):
                mfs, j = [], 0
                for group in model.mfs_per_input:
                    mfs.append(
                        tuple(
                            MembershipFunction(float(centers[j + k]), float(widths[j + k]))
                            for k in range(len(group))
                        )
                    )
                    j += len(group)
                m2 = replace(model, mfs_per_input=tuple(mfs))
                return float(np.mean((predict_batch(m2, X) - t) ** 2))

            p = model._packed
            M = len(p.centers)
            fd = np.empty(2 * M)
            for j in range(M):
                cp, cm = p.centers.copy(), p.centers.copy()
                cp[j] += h
                cm[j] -= h
                fd[j] = (loss_at(cp, p.widths) - loss_at(cm, p.widths)) / (2 * h)
                sp, sm = p.widths.copy(), p.widths.copy()
                sp[j] += h
                sm[j] -= h
                fd[M + j] = (loss_at(p.centers, sp) - loss_at(p.centers, sm)) / (2 * h)
            # atol floor absorbs exact-zero gradients, where central
            # differences return pure round-off
            np.testing.assert_allclose(analytic, fd, rtol=1e-4, atol=1e-8)

    def test_width_clamped_at_floor(self, rng):
        model = random_small_model(rng, n=1, m=1, n_rules=1)
        X = rng.uniform(0, 1, (10, 1))
        ds = Dataset(model.feature_names, X, rng.uniform(0, 1, 10), {})
        # a huge learning rate slams the width into the clamp
        stepped = premise_gradient_step(model, ds, learning_rate=1e12)
        for group in stepped.mfs_per_input:
            for mf in group:
                assert mf.width >= MIN_WIDTH


class TestFit:
    def test_linearly_separable(self, rng):
        # label = 1 when 0.8*x1 + 0.2*x2 > 0.5
        X = rng.uniform(0, 1, (600, 2))
        labels = (0.8 * X[:, 0] + 0.2 * X[:, 1] > 0.5).astype(np.int8)
        ds = Dataset(("x1", "x2"), X, labels, {})
        train = Dataset(("x1", "x2"), X[:400], labels[:400], {})
        test = Dataset(("x1", "x2"), X[400:], labels[400:], {})
        model, report = fit(train, test, TrainConfig(epochs=10))
        assert report.test_acc >= 0.9

    def test_realizable_targets_reach_tiny_loss(self, rng):
        target_model = init_grid(2, ("a", "b"), TrainConfig(mfs_per_input=2))
        target_model = replace(
            target_model,
            rules=tuple(
                Rule(r.mf_indices, tuple(rng.uniform(-0.5, 0.5, 3))) for r in target_model.rules
            ),
        )
        X = rng.uniform(0, 1, (300, 2))
        t = predict_batch(target_model, X)
        train = Dataset(("a", "b"), X[:200], t[:200], {})
        test = Dataset(("a", "b"), X[200:], t[200:], {})
        _, report = fit(train, test, TrainConfig(epochs=3, ridge_lambda=1e-12))
        assert min(report.loss) < 1e-4

    def test_deterministic_report_and_model_bytes(self, rng):
        X = rng.uniform(0, 1, (300, 2))
        labels = (X[:, 0] > 0.5).astype(np.int8)
        train = Dataset(("a", "b"), X[:200], labels[:200], {})
        test = Dataset(("a", "b"), X[200:], labels[200:], {})
        cfg = TrainConfig(epochs=5, seed=7)
        model1, report1 = fit(train, test, cfg)
        model2, report2 = fit(train, test, cfg)
        assert report1 == report2
        assert dumps_model(model1) == dumps_model(model2)

    def test_losses_finite_nonnegative(self, rng):
        X = rng.uniform(0, 1, (100, 2))
        labels = (X[:, 0] > 0.5).astype(np.int8)
        ds = Dataset(("a", "b"), X, labels, {})
        _, report = fit(ds, ds, TrainConfig(epochs=4))
        assert all(np.isfinite(l) and l >= 0 for l in report.loss)

    def test_fitted_outputs_bounded(self, rng):
        X = rng.uniform(0, 1, (200, 2))
        labels = (X[:, 0] > 0.5).astype(np.int8)
        ds = Dataset(("a", "b"), X, labels, {})
        model, _ = fit(ds, ds, TrainConfig(epochs=4))
        assert np.max(np.abs(predict_batch(model, X))) <= 10.0
