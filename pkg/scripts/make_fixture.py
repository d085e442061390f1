#!/usr/bin/env python3
"""Regenerate the bundled 400-user ads-response fixture.

The benchmark needs a small social-ads style dataset (user id, gender,
age, salary, binary purchase response). This synthesizes one as a
mixture of Gaussian clusters in (age, salary): purchases concentrate
among older mid-earners and young high earners, non-purchases among
young mid-earners and middle-aged high earners, giving a nonlinear
decision surface with a 64/36 negative/positive balance. Deterministic;
rerunning reproduces the committed CSV exactly.
"""

import csv
import sys
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "data" / "social_ads_400.csv"
N = 400
N_POSITIVE = 144
SEED = 20240517
OVERLAP = 1.15  # widens every cluster to make the classes overlap

# (fraction, (age mean, age std), (salary mean, salary std))
POSITIVE_CLUSTERS = [
    (0.55, (52, 5), (62000, 16000)),
    (0.45, (27, 4), (118000, 14000)),
]
NEGATIVE_CLUSTERS = [
    (0.5, (31, 6), (52000, 16000)),
    (0.5, (46, 6), (108000, 16000)),
]


def main():
    rng = np.random.default_rng(SEED)

    def clusters(n, specs):
        parts = []
        for frac, (ma, sa), (ms, ss) in specs:
            k = int(round(n * frac))
            parts.append(
                np.column_stack(
                    [rng.normal(ma, sa * OVERLAP, k), rng.normal(ms, ss * OVERLAP, k)]
                )
            )
        return np.vstack(parts)[:n]

    pos = clusters(N_POSITIVE, POSITIVE_CLUSTERS)
    neg = clusters(N - N_POSITIVE, NEGATIVE_CLUSTERS)
    X = np.vstack([pos, neg])
    y = np.array([1] * len(pos) + [0] * len(neg))
    order = rng.permutation(len(y))
    X, y = X[order], y[order]

    age = np.clip(np.round(X[:, 0]), 18, 60).astype(int)
    salary = np.clip(np.round(X[:, 1], -3), 15000, 150000).astype(int)
    gender = np.where(rng.uniform(size=N) < 0.49, "Male", "Female")

    OUT.parent.mkdir(exist_ok=True)
    with OUT.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "gender", "age", "salary", "purchased"])
        writer.writerows(zip(range(15624510, 15624510 + N), gender, age, salary, y))
    n_pos = int(y.sum())
    print(f"wrote {OUT} ({N} rows, {N - n_pos} negative / {n_pos} positive)")


if __name__ == "__main__":
    sys.exit(main())
