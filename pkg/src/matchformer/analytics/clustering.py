"""Small-scale k-means for grouping position embeddings."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..seeding import rng_for


def _assign(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def _wcss(points: np.ndarray, centers: np.ndarray, labels: np.ndarray) -> float:
    return float(((points - centers[labels]) ** 2).sum())


def kmeans(points: np.ndarray, k: int, seed: int = 0, restarts: int = 20,
           max_iter: int = 100) -> tuple:
    """Lloyd's algorithm, best of ``restarts`` by within-cluster sum of squares.

    Deterministic for a fixed seed. Returns ``(labels, centers, wcss)``.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ConfigError(f"k must be in [1, {n}], got {k}")
    best = None
    for restart in range(restarts):
        rng = rng_for(seed, "kmeans", restart)
        centers = points[rng.choice(n, size=k, replace=False)].copy()
        labels = _assign(points, centers)
        for _ in range(max_iter):
            for j in range(k):
                member = labels == j
                if member.any():
                    centers[j] = points[member].mean(axis=0)
                else:
                    # re-seed an empty cluster at the farthest point
                    d2 = ((points - centers[labels]) ** 2).sum(axis=1)
                    centers[j] = points[d2.argmax()]
            new_labels = _assign(points, centers)
            if np.array_equal(new_labels, labels):
                break
            labels = new_labels
        score = _wcss(points, centers, labels)
        if best is None or score < best[2] - 1e-12:
            best = (labels.copy(), centers.copy(), score)
    return best


def cluster_positions(positions_em, k: int, seed: int = 0,
                      restarts: int = 20) -> dict:
    """Group position embeddings into ``k`` clusters; id -> cluster index."""
    labels, _, _ = kmeans(positions_em.vectors, k=k, seed=seed, restarts=restarts)
    return {pid: int(label) for pid, label in zip(positions_em.ids, labels)}
