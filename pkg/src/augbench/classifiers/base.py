"""Shared prediction interface.

Every fitted model exposes `decision_scores(X)` (higher = more
positive-class) and a fixed `threshold`; the predicted label is 1 iff
score >= threshold. Probability-like models threshold at 0.5, margin
models at 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ScoredPrediction:
    label: int
    score: float


def predict(model, features: np.ndarray) -> list[ScoredPrediction]:
    scores = model.decision_scores(np.asarray(features, dtype=float))
    thr = model.threshold
    return [ScoredPrediction(int(s >= thr), float(s)) for s in scores]


def predict_labels(model, features: np.ndarray) -> np.ndarray:
    scores = model.decision_scores(np.asarray(features, dtype=float))
    return (scores >= model.threshold).astype(int)
