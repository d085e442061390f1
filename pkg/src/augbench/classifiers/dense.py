"""Dense ReLU network classifier trained with Adam on cross-entropy."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nncore import AdamState, MlpParams, adam_step, init_mlp, mlp_backward, mlp_forward
from ..rng import RngStream

PROB_CLAMP = 1e-12


@dataclass
class DenseNetConfig:
    hidden: tuple[int, int] = (16, 8)
    epochs: int = 500
    learning_rate: float = 1e-3


@dataclass
class DenseNetModel:
    params: MlpParams
    threshold: float = 0.5
    loss_history: list[float] = field(default_factory=list, repr=False)

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        return mlp_forward(self.params, X)[-1][:, 0]

    @property
    def hyperparams(self) -> dict:
        sizes = [self.params.input_size] + [l.weights.shape[1] for l in self.params.layers]
        return {"architecture": "->".join(map(str, sizes))}


def fit_dense_net(
    X: np.ndarray, y: np.ndarray,
    config: DenseNetConfig | None = None,
    rng: RngStream | None = None,
) -> DenseNetModel:
    config = config or DenseNetConfig()
    rng = rng or RngStream(0, ("dense",))
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1, 1)
    if len(np.unique(y)) < 2:
        raise ValueError("both classes must be present")

    params = init_mlp(
        [X.shape[1], *config.hidden, 1],
        ["relu", "relu", "sigmoid"],
        rng.derive("init"),
    )
    arrays = params.arrays()
    state = AdamState.for_arrays(arrays, alpha=config.learning_rate)
    model = DenseNetModel(params)
    n = len(y)

    for epoch in range(config.epochs):
        acts = mlp_forward(model.params, X)
        p = np.clip(acts[-1], PROB_CLAMP, 1.0 - PROB_CLAMP)
        loss = float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))
        if not np.isfinite(loss):
            raise FloatingPointError(f"non-finite loss at epoch {epoch}")
        model.loss_history.append(loss)
        d_out = (p - y) / (n * p * (1.0 - p))  # dBCE/d(sigmoid output)
        grads, _ = mlp_backward(model.params, acts, d_out)
        arrays, state = adam_step(arrays, grads, state)
        model.params = model.params.with_arrays(arrays)
    return model
