"""Comparison algorithms: restarted k-means and NJW spectral clustering."""

from __future__ import annotations

import numpy as np

from .errors import DegenerateDataError, InputError
from .kernels import DataSet, KernelSpec, pairwise_distances
from .linalg import eigendecompose

MAX_LLOYD_ITERATIONS = 300


def _lloyd(points: np.ndarray, k: int, rng: np.random.Generator):
    """One k-means run from a random initialization.

    Returns (labels 0-based, criterion, criterion history).  The criterion
    (within-cluster sum of squares) is nonincreasing across iterations.
    """
    n = points.shape[0]
    centroids = points[rng.choice(n, size=k, replace=False)].copy()
    labels = np.full(n, -1)
    history = []
    for _ in range(MAX_LLOYD_ITERATIONS):
        sq = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = sq.argmin(axis=1)
        # Reseed any empty cluster at the point farthest from its centroid.
        for empty in range(k):
            if not np.any(new_labels == empty):
                far = int(sq[np.arange(n), new_labels].argmax())
                centroids[empty] = points[far]
                sq[:, empty] = ((points - centroids[empty]) ** 2).sum(axis=1)
                new_labels = sq.argmin(axis=1)
        history.append(float(sq[np.arange(n), new_labels].sum()))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = labels == j
            if np.any(members):
                centroids[j] = points[members].mean(axis=0)
    criterion = float(((points - centroids[labels]) ** 2).sum())
    return labels, criterion, history


def kmeans(data: DataSet, k: int, restarts: int = 50, seed=0) -> np.ndarray:
    """Lloyd's k-means, keeping the best of ``restarts`` random starts.

    Each restart initializes the centroids at k distinct data points and
    iterates to an assignment fixed point (or the 300-iteration cap); the
    returned labeling minimizes the within-cluster sum of squares over the
    restarts, ties broken by restart index.  Labels are in ``1..k``.
    """
    if not 1 <= k <= data.n:
        raise InputError(f"k must be in 1..{data.n}, got {k}")
    if restarts < 1:
        raise InputError(f"restarts must be positive, got {restarts}")
    streams = np.random.SeedSequence(seed).spawn(restarts)
    best_labels, best_criterion = None, np.inf
    for child in streams:
        labels, criterion, _ = _lloyd(data.points, k, np.random.default_rng(child))
        if criterion < best_criterion:
            best_labels, best_criterion = labels, criterion
    return best_labels + 1


def njw_spectral(data: DataSet, k: int, omega: float, seed=0, restarts: int = 50) -> np.ndarray:
    """Normalized spectral clustering on the zero-diagonal Gaussian affinity.

    Builds ``A_ij = exp(-||x_i - x_j||^2 / (2 omega^2))`` with a zero
    diagonal, takes the top-k eigenvectors of ``D^{-1/2} A D^{-1/2}``
    (equivalently the bottom of the normalized Laplacian), renormalizes the
    n-by-k embedding rows to unit length, and k-means the rows with the
    same restart policy as :func:`kmeans`.  Labels are in ``1..k``.

    Raises
    ------
    DegenerateDataError
        If a point has zero affinity to every other point (isolated row).
    """
    if not 2 <= k <= data.n:
        raise InputError(f"k must be in 2..{data.n}, got {k}")
    spec = KernelSpec("gaussian", omega)
    affinity = spec.profile(pairwise_distances(data.points))
    np.fill_diagonal(affinity, 0.0)
    degree = affinity.sum(axis=1)
    if np.any(degree <= 0.0):
        raise DegenerateDataError("isolated point: a row of the affinity matrix sums to zero")
    inv_sqrt = 1.0 / np.sqrt(degree)
    normalized = affinity * inv_sqrt[:, None] * inv_sqrt[None, :]
    eig = eigendecompose(normalized)
    embedding = eig.vectors[:, :k]
    row_norms = np.linalg.norm(embedding, axis=1)
    if np.any(row_norms == 0.0):
        raise DegenerateDataError("degenerate embedding: a row of the eigenvector matrix is zero")
    embedding = embedding / row_norms[:, None]
    return kmeans(DataSet(embedding), k, restarts=restarts, seed=seed)
