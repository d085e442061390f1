"""RBF-kernel SVM trained by sequential minimal optimization (SMO).

Working-set selection: the first index is the worst KKT violator, the
second maximizes |E_i - E_j|. Pair updates are the analytic clipped
solution of the two-variable subproblem; the bias follows the standard
b1/b2 rule. Convergence is declared when no KKT violation exceeds the
tolerance. C is chosen by stratified CV (ties to the smallest C),
gamma defaults to 1/d.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..rng import RngStream
from .cv import CvResult, cross_validate

log = logging.getLogger(__name__)

DEFAULT_C_GRID = (0.1, 1.0, 10.0)


@dataclass
class RbfSvmConfig:
    C: float | str = "auto"
    c_grid: tuple = DEFAULT_C_GRID
    gamma: float | None = None  # None = 1/d
    kkt_tol: float = 1e-3
    max_iter: int = 20000
    cv_folds: int = 5


@dataclass
class RbfSvmModel:
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i over support vectors
    bias: float
    gamma: float
    C: float
    alphas: np.ndarray = field(repr=False, default=None)  # full, incl. zeros
    train_labels_pm: np.ndarray = field(repr=False, default=None)
    threshold: float = 0.0
    converged: bool = True
    cv_result: CvResult | None = field(default=None, repr=False)

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        if len(self.support_vectors) == 0:
            return np.full(len(X), self.bias)
        d2 = (
            np.sum(X**2, axis=1)[:, None]
            + np.sum(self.support_vectors**2, axis=1)[None, :]
            - 2.0 * X @ self.support_vectors.T
        )
        return np.exp(-self.gamma * np.maximum(d2, 0.0)) @ self.dual_coef + self.bias

    @property
    def hyperparams(self) -> dict:
        return {"C": self.C, "gamma": self.gamma}


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    d2 = (
        np.sum(A**2, axis=1)[:, None]
        + np.sum(B**2, axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    return np.exp(-gamma * np.maximum(d2, 0.0))


def _kkt_violations(alpha: np.ndarray, yf: np.ndarray, C: float) -> np.ndarray:
    """Per-sample violation of the KKT conditions (0 when satisfied)."""
    r = yf - 1.0
    viol = np.zeros_like(alpha)
    lower = alpha < C - 1e-12  # requires y*f >= 1
    upper = alpha > 1e-12  # requires y*f <= 1
    viol[lower] = np.maximum(viol[lower], -r[lower])
    viol[upper] = np.maximum(viol[upper], r[upper])
    return np.maximum(viol, 0.0)


def _smo(
    K: np.ndarray, y: np.ndarray, C: float, tol: float, max_iter: int
) -> tuple[np.ndarray, float, bool]:
    """Solve the dual; returns (alpha, bias, converged)."""
    n = len(y)
    alpha = np.zeros(n)
    b = 0.0
    f = np.full(n, b)  # decision value cache

    diag = np.diag(K).copy()
    for _ in range(max_iter):
        E = f - y
        viol = _kkt_violations(alpha, y * f, C)
        if viol.max() <= tol:
            return alpha, b, True
        i = int(np.argmax(viol))

        # Vectorized second-index choice: among all j whose clipped
        # analytic update actually moves alpha, take max |E_i - E_j|.
        same = y == y[i]
        lo = np.where(same, np.maximum(0.0, alpha[i] + alpha - C),
                      np.maximum(0.0, alpha - alpha[i]))
        hi = np.where(same, np.minimum(C, alpha[i] + alpha),
                      np.minimum(C, C + alpha - alpha[i]))
        eta = diag[i] + diag - 2.0 * K[i]
        safe_eta = np.where(eta > 1e-12, eta, 1.0)
        aj_all = np.clip(alpha + y * (E[i] - E) / safe_eta, lo, hi)
        movable = (
            (hi - lo > 1e-12)
            & (eta > 1e-12)
            & (np.abs(aj_all - alpha) > 1e-12)
        )
        movable[i] = False
        if not movable.any():
            break  # no pair makes progress; treat as stalled
        gap = np.where(movable, np.abs(E - E[i]), -np.inf)
        j = int(np.argmax(gap))

        aj_new = float(aj_all[j])
        ai_new = alpha[i] + y[i] * y[j] * (alpha[j] - aj_new)
        d_ai, d_aj = ai_new - alpha[i], aj_new - alpha[j]

        b1 = b - E[i] - y[i] * d_ai * K[i, i] - y[j] * d_aj * K[i, j]
        b2 = b - E[j] - y[i] * d_ai * K[i, j] - y[j] * d_aj * K[j, j]
        if 1e-12 < ai_new < C - 1e-12:
            b_new = b1
        elif 1e-12 < aj_new < C - 1e-12:
            b_new = b2
        else:
            b_new = (b1 + b2) / 2.0

        f = f + y[i] * d_ai * K[i] + y[j] * d_aj * K[j] + (b_new - b)
        alpha[i], alpha[j] = ai_new, aj_new
        b = b_new

    converged = _kkt_violations(alpha, y * f, C).max() <= tol
    return alpha, b, converged


def _fit_fixed_c(
    X: np.ndarray, y01: np.ndarray, C: float, config: RbfSvmConfig
) -> RbfSvmModel:
    y = 2.0 * np.asarray(y01, dtype=float) - 1.0
    gamma = config.gamma if config.gamma is not None else 1.0 / X.shape[1]
    K = rbf_kernel(X, X, gamma)
    alpha, b, converged = _smo(K, y, C, config.kkt_tol, config.max_iter)
    if not converged:
        log.warning("SMO did not reach tolerance %g; returning best iterate", config.kkt_tol)
    sv = alpha > 1e-12
    return RbfSvmModel(
        support_vectors=X[sv].copy(),
        dual_coef=(alpha * y)[sv],
        bias=b,
        gamma=gamma,
        C=C,
        alphas=alpha,
        train_labels_pm=y,
        converged=converged,
    )


def fit_rbf_svm(
    X: np.ndarray, y: np.ndarray,
    config: RbfSvmConfig | None = None,
    rng: RngStream | None = None,
) -> RbfSvmModel:
    config = config or RbfSvmConfig()
    rng = rng or RngStream(0, ("rbf-svm",))
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if len(np.unique(y)) < 2:
        raise ValueError("both classes must be present")

    if config.C != "auto":
        return _fit_fixed_c(X, y, config.C, config)

    def trainer(Xt, yt, c, _stream):
        return _fit_fixed_c(Xt, yt, c, config)

    cv = cross_validate(trainer, X, y, config.cv_folds, list(config.c_grid), rng)
    model = _fit_fixed_c(X, y, cv.best_param, config)
    model.cv_result = cv
    return model
