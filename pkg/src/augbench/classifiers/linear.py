"""Regularized logistic regression and linear soft-margin SVM.

Logistic regression minimizes mean cross-entropy plus lambda*||w||^2/2
(bias unregularized) with full-batch Adam; its score is the sigmoid
probability, thresholded at 0.5. The linear SVM minimizes
lambda*||w||^2/2 plus mean hinge loss by subgradient descent with the
1/(lambda*t) step schedule; its score is the signed margin, thresholded
at 0. Regularization strength is chosen by stratified CV with ties to
the stronger regularizer (grids are listed largest-lambda first).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nncore import AdamState, adam_step, sigmoid
from ..rng import RngStream
from .cv import CvResult, cross_validate

LOGISTIC_LAMBDA_GRID = (1.0, 0.1, 0.01, 0.0)
SVM_LAMBDA_GRID = (1.0, 0.1, 0.01, 0.001)


@dataclass
class LogisticConfig:
    reg_lambda: float | str = "auto"
    lambda_grid: tuple = LOGISTIC_LAMBDA_GRID
    epochs: int = 1000
    learning_rate: float = 0.05
    cv_folds: int = 5


@dataclass
class LinearSvmConfig:
    reg_lambda: float | str = "auto"
    lambda_grid: tuple = SVM_LAMBDA_GRID
    epochs: int = 2000
    cv_folds: int = 5


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    kind: str  # "logistic" | "linear-svm"
    reg_lambda: float
    threshold: float
    loss_history: list[float] = field(default_factory=list, repr=False)
    cv_result: CvResult | None = field(default=None, repr=False)

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        margin = X @ self.weights + self.bias
        if self.kind == "logistic":
            return sigmoid(margin)
        return margin

    @property
    def hyperparams(self) -> dict:
        return {"kind": self.kind, "lambda": self.reg_lambda}


def _check_two_classes(y: np.ndarray):
    if len(np.unique(y)) < 2:
        raise ValueError("both classes must be present")


def logistic_loss_grad(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, reg_lambda: float
) -> tuple[float, np.ndarray, float]:
    """Mean cross-entropy + lambda*||w||^2/2; returns (loss, dw, db)."""
    n = len(y)
    p = sigmoid(X @ w + b)
    pc = np.clip(p, 1e-12, 1.0 - 1e-12)
    loss = float(-np.mean(y * np.log(pc) + (1 - y) * np.log(1 - pc)))
    loss += 0.5 * reg_lambda * float(w @ w)
    diff = p - y
    dw = X.T @ diff / n + reg_lambda * w
    db = float(diff.mean())
    return loss, dw, db


def _fit_logistic_fixed(
    X: np.ndarray, y: np.ndarray, reg_lambda: float, config: LogisticConfig
) -> LinearModel:
    w = np.zeros(X.shape[1])
    b = 0.0
    state = AdamState.for_arrays([w, np.zeros(1)], alpha=config.learning_rate)
    history = []
    for _ in range(config.epochs):
        loss, dw, db = logistic_loss_grad(w, b, X, y, reg_lambda)
        history.append(loss)
        (w, b_arr), state = adam_step([w, np.array([b])], [dw, np.array([db])], state)
        b = float(b_arr[0])
    return LinearModel(w, b, "logistic", reg_lambda, 0.5, history)


def fit_logistic(
    X: np.ndarray, y: np.ndarray,
    config: LogisticConfig | None = None,
    rng: RngStream | None = None,
) -> LinearModel:
    config = config or LogisticConfig()
    rng = rng or RngStream(0, ("logistic",))
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    _check_two_classes(y)

    if config.reg_lambda != "auto":
        return _fit_logistic_fixed(X, y, config.reg_lambda, config)

    def trainer(Xt, yt, lam, _stream):
        return _fit_logistic_fixed(Xt, yt, lam, config)

    cv = cross_validate(trainer, X, y, config.cv_folds, list(config.lambda_grid), rng)
    model = _fit_logistic_fixed(X, y, cv.best_param, config)
    model.cv_result = cv
    return model


def _fit_linear_svm_fixed(
    X: np.ndarray, y01: np.ndarray, reg_lambda: float, config: LinearSvmConfig
) -> LinearModel:
    if reg_lambda <= 0:
        raise ValueError("linear SVM requires reg_lambda > 0 (step schedule 1/(lambda*t))")
    y = 2.0 * y01 - 1.0
    n = len(y)
    w = np.zeros(X.shape[1])
    b = 0.0
    history = []
    for t in range(1, config.epochs + 1):
        margin = y * (X @ w + b)
        viol = margin < 1.0
        hinge = float(np.mean(np.maximum(0.0, 1.0 - margin)))
        history.append(0.5 * reg_lambda * float(w @ w) + hinge)
        eta = 1.0 / (reg_lambda * t)
        gw = reg_lambda * w - (X[viol].T @ y[viol]) / n
        gb = -float(y[viol].sum()) / n
        w = w - eta * gw
        b = b - eta * gb
    return LinearModel(w, b, "linear-svm", reg_lambda, 0.0, history)


def fit_linear_svm(
    X: np.ndarray, y: np.ndarray,
    config: LinearSvmConfig | None = None,
    rng: RngStream | None = None,
) -> LinearModel:
    config = config or LinearSvmConfig()
    rng = rng or RngStream(0, ("linear-svm",))
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    _check_two_classes(y)

    if config.reg_lambda != "auto":
        return _fit_linear_svm_fixed(X, y, config.reg_lambda, config)

    def trainer(Xt, yt, lam, _stream):
        return _fit_linear_svm_fixed(Xt, yt, lam, config)

    cv = cross_validate(trainer, X, y, config.cv_folds, list(config.lambda_grid), rng)
    model = _fit_linear_svm_fixed(X, y, cv.best_param, config)
    model.cv_result = cv
    return model
