"""Stratified k-fold cross-validation for hyperparameter grids.

The grid is evaluated in order and ties in mean validation accuracy go
to the earliest entry, so callers list grids simplest-setting-first
(smallest depth/k/C, largest regularization).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..metrics import accuracy
from ..rng import RngStream
from .base import predict_labels


class CvError(Exception):
    pass


@dataclass
class CvResult:
    best_param: object
    best_index: int
    # one row per grid entry: (param, mean validation accuracy, fold accuracies)
    table: list[tuple[object, float, list[float]]]


def stratified_kfold(
    labels: np.ndarray, folds: int, rng: RngStream, max_attempts: int = 5
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-class shuffle, deal round-robin; every fold keeps both classes."""
    if folds < 2:
        raise CvError("need at least 2 folds")
    labels = np.asarray(labels)
    classes = np.unique(labels)

    for attempt in range(max_attempts):
        assignment = np.empty(len(labels), dtype=int)
        for c in classes:
            idx = np.flatnonzero(labels == c)
            order = idx[rng.derive(f"attempt{attempt}-class{c}").permutation(len(idx))]
            assignment[order] = np.arange(len(order)) % folds
        ok = all(
            len(np.unique(labels[assignment == f])) == len(classes)
            for f in range(folds)
        )
        if ok:
            return [
                (np.flatnonzero(assignment != f), np.flatnonzero(assignment == f))
                for f in range(folds)
            ]
    raise CvError(f"could not build {folds} stratified folds with both classes")


def cross_validate(
    trainer: Callable[[np.ndarray, np.ndarray, object, RngStream], object],
    features: np.ndarray,
    labels: np.ndarray,
    folds: int,
    grid: Sequence[object],
    rng: RngStream,
) -> CvResult:
    """Mean validation accuracy per grid point; first-best wins ties."""
    if not grid:
        raise CvError("empty hyperparameter grid")
    splits = stratified_kfold(labels, folds, rng.derive("folds"))
    table = []
    for gi, param in enumerate(grid):
        fold_accs = []
        for fi, (tr, va) in enumerate(splits):
            model = trainer(
                features[tr], labels[tr], param, rng.derive(f"fit-g{gi}-f{fi}")
            )
            fold_accs.append(accuracy(labels[va], predict_labels(model, features[va])))
        table.append((param, float(np.mean(fold_accs)), fold_accs))
    best_index = int(np.argmax([row[1] for row in table]))  # argmax keeps first tie
    return CvResult(table[best_index][0], best_index, table)
