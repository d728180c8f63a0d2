"""Hybrid trainer for the fuzzy rule base.

Each epoch solves the consequent coefficients exactly by regularized least
squares (a convex subproblem), then takes one batch gradient-descent step on
the Gaussian centers and widths. The epoch-best model by training loss is
returned. Training is fully deterministic: grid initialization, full-batch
gradients, fixed accumulation order. It always runs on the NumPy kernel path
so fitted models are identical no matter which inference backend is compiled.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels_py as knp
from .data import Dataset
from .errors import RuleCapExceeded, SingularSystem, TrainingDiverged
from .fuzzy import LabelEncoding, MembershipFunction, Rule, TskModel

# widths never drop below this during gradient updates
MIN_WIDTH = 1e-3

# fitted training outputs outside [-OUTPUT_BOUND, OUTPUT_BOUND] mean divergence
OUTPUT_BOUND = 10.0


@dataclass(frozen=True)
class TrainConfig:
    mfs_per_input: int = 2
    epochs: int = 15
    premise_learning_rate: float = 0.05
    # grid models carry ~1 consequent parameter per training row at the
    # default sizes; a ridge this large is what keeps test accuracy up
    ridge_lambda: float = 1e-2
    seed: int = 0  # reserved; the trainer has no stochastic steps
    rule_cap: int = 256

    def __post_init__(self):
        if self.mfs_per_input < 1:
            raise ValueError("mfs_per_input must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.premise_learning_rate < 0:
            raise ValueError("premise_learning_rate must be >= 0")
        if self.ridge_lambda < 0:
            raise ValueError("ridge_lambda must be >= 0")
        if self.rule_cap < 1:
            raise ValueError("rule_cap must be >= 1")


@dataclass(frozen=True)
class TrainReport:
    loss: list[float]
    train_acc: float
    test_acc: float

    def to_dict(self) -> dict:
        return {"loss": list(self.loss), "train_acc": self.train_acc, "test_acc": self.test_acc}


def init_grid(n_inputs: int, feature_names, config: TrainConfig) -> TskModel:
    """Evenly spaced Gaussian grid with one rule per membership combination.

    Centers cover [0, 1]; widths are half the center spacing so neighboring
    bumps overlap. Consequent coefficients start at zero.
    """
    m = config.mfs_per_input
    n_rules = m**n_inputs
    if n_rules > config.rule_cap:
        raise RuleCapExceeded(
            f"{m} memberships on {n_inputs} inputs gives {n_rules} grid rules, "
            f"cap is {config.rule_cap}"
        )
    if m == 1:
        mfs = (MembershipFunction(0.5, 0.5),)
    else:
        width = 1.0 / (2.0 * (m - 1))
        centers = np.linspace(0.0, 1.0, m)
        mfs = tuple(MembershipFunction(float(c), width) for c in centers)
    zero = tuple(0.0 for _ in range(n_inputs + 1))
    rules = tuple(
        Rule(combo, zero) for combo in itertools.product(range(m), repeat=n_inputs)
    )
    return TskModel(
        feature_names=tuple(feature_names),
        mfs_per_input=tuple(mfs for _ in range(n_inputs)),
        rules=rules,
        label_encoding=LabelEncoding(),
    )


def predict_batch(model: TskModel, X: np.ndarray) -> np.ndarray:
    """Deterministic reference predictions used throughout training."""
    p = model._packed
    X = np.ascontiguousarray(X, dtype=np.float64)
    y, _ = knp.eval_batch(p.centers, p.widths, p.input_of, p.rule_mf, p.coeffs, X)
    return y


def mean_squared_loss(model: TskModel, dataset: Dataset) -> float:
    y = predict_batch(model, dataset.X)
    t = dataset.labels.astype(np.float64)
    return float(np.mean((y - t) ** 2))


def accuracy(model: TskModel, dataset: Dataset) -> float:
    y = predict_batch(model, dataset.X)
    enc = model.label_encoding
    if enc.war >= enc.peace:
        pred = (y >= enc.threshold).astype(np.int8)
    else:
        pred = (y <= enc.threshold).astype(np.int8)
    return float(np.mean(pred == dataset.labels))


def _normalized_firing(model: TskModel, X: np.ndarray) -> np.ndarray:
    p = model._packed
    W = knp.firing_batch(p.centers, p.widths, p.input_of, p.rule_mf, X)
    wsum = np.maximum(W.sum(axis=1, keepdims=True), knp.DENOM_FLOOR)
    return W / wsum


def _design_matrix(model: TskModel, X: np.ndarray) -> np.ndarray:
    """Rows stack, rule by rule, normalized firing strength times [1, x]."""
    n, r = model.n_inputs, model.n_rules
    Wbar = _normalized_firing(model, X)  # (N, R)
    ones_x = np.concatenate([np.ones((X.shape[0], 1)), X], axis=1)  # (N, n+1)
    phi = Wbar[:, :, None] * ones_x[:, None, :]  # (N, R, n+1)
    return phi.reshape(X.shape[0], r * (n + 1))


def lse_consequents(model: TskModel, dataset: Dataset, ridge_lambda: float) -> TskModel:
    """Replace consequent coefficients by the ridge least-squares optimum.

    Premise parameters are untouched. With ridge_lambda = 0 a rank-deficient
    system raises SingularSystem instead of returning one of many solutions.
    """
    if dataset.n_rows == 0:
        raise ValueError("dataset must be nonempty")
    X = np.ascontiguousarray(dataset.X, dtype=np.float64)
    t = dataset.labels.astype(np.float64)
    phi = _design_matrix(model, X)
    n_params = phi.shape[1]
    if ridge_lambda == 0.0:
        if np.linalg.matrix_rank(phi) < n_params:
            raise SingularSystem(
                f"normal system is rank-deficient ({n_params} parameters, "
                f"rank {np.linalg.matrix_rank(phi)}); use ridge_lambda > 0"
            )
        theta, *_ = np.linalg.lstsq(phi, t, rcond=None)
    else:
        gram = phi.T @ phi + ridge_lambda * np.eye(n_params)
        theta = np.linalg.solve(gram, phi.T @ t)
    coeffs = theta.reshape(model.n_rules, model.n_inputs + 1)
    rules = tuple(
        Rule(rule.mf_indices, tuple(coeffs[r])) for r, rule in enumerate(model.rules)
    )
    return replace(model, rules=rules)


def _premise_gradients(model: TskModel, X: np.ndarray, t: np.ndarray):
    """Analytic d(MSE)/d(center), d(MSE)/d(width) over the packed layout."""
    p = model._packed
    N = X.shape[0]
    W = knp.firing_batch(p.centers, p.widths, p.input_of, p.rule_mf, X)  # (N, R)
    G = p.coeffs[:, 0] + X @ p.coeffs[:, 1:].T  # (N, R)
    wsum = W.sum(axis=1)
    clamped = wsum <= knp.DENOM_FLOOR
    denom = np.maximum(wsum, knp.DENOM_FLOOR)
    y = (W * G).sum(axis=1) / denom
    # d y / d w_r = (g_r - y) / denom, except where the denominator is clamped
    # and stops depending on the strengths
    ycontrib = np.where(clamped, 0.0, y)
    A = (2.0 / N) * (y - t)[:, None] * (G - ycontrib[:, None]) / denom[:, None] * W

    dc = np.zeros_like(p.centers)
    ds = np.zeros_like(p.widths)
    for i in range(model.n_inputs):
        j = p.rule_mf[:, i]  # (R,) flat membership index used by each rule
        diff = X[:, i][:, None] - p.centers[j][None, :]  # (N, R)
        s = p.widths[j][None, :]
        np.add.at(dc, j, (A * diff / (s * s)).sum(axis=0))
        np.add.at(ds, j, (A * diff * diff / (s * s * s)).sum(axis=0))
    return dc, ds


def premise_gradient_step(
    model: TskModel, dataset: Dataset, learning_rate: float
) -> TskModel:
    """One full-batch gradient step on the centers and widths."""
    X = np.ascontiguousarray(dataset.X, dtype=np.float64)
    t = dataset.labels.astype(np.float64)
    dc, ds = _premise_gradients(model, X, t)
    p = model._packed
    centers = p.centers - learning_rate * dc
    widths = np.maximum(p.widths - learning_rate * ds, MIN_WIDTH)
    mfs = []
    j = 0
    for group in model.mfs_per_input:
        mfs.append(
            tuple(
                MembershipFunction(float(centers[j + k]), float(widths[j + k]))
                for k in range(len(group))
            )
        )
        j += len(group)
    return replace(model, mfs_per_input=tuple(mfs))


def fit(
    train: Dataset, test: Dataset, config: TrainConfig
) -> tuple[TskModel, TrainReport]:
    """Alternate exact consequent solves with premise gradient steps.

    Returns the epoch-best model by training loss, its train/test accuracy,
    and the per-epoch loss curve.
    """
    model = init_grid(len(train.feature_names), train.feature_names, config)
    losses: list[float] = []
    best_model = model
    best_loss = math.inf
    for _ in range(config.epochs):
        model = lse_consequents(model, train, config.ridge_lambda)
        loss = mean_squared_loss(model, train)
        losses.append(loss)
        if loss < best_loss:
            best_loss = loss
            best_model = model
        model = premise_gradient_step(model, train, config.premise_learning_rate)

    y_train = predict_batch(best_model, train.X)
    if not np.all(np.isfinite(y_train)) or np.max(np.abs(y_train)) > OUTPUT_BOUND:
        raise TrainingDiverged(
            f"training outputs left [-{OUTPUT_BOUND}, {OUTPUT_BOUND}]; "
            "lower the learning rate or raise the ridge penalty"
        )
    report = TrainReport(
        loss=losses,
        train_acc=accuracy(best_model, train),
        test_acc=accuracy(best_model, test),
    )
    return best_model, report
