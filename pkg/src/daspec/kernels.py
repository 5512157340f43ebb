"""Radial kernels, the normalized kernel matrix, and eigenvector extension.

The kernel matrix built here carries the ``1/n`` normalization, so its
spectrum approximates the spectrum of the population convolution operator
``f -> integral K(., y) f(y) dP(y)``.  An eigenvector of that matrix extends
to a function on all of R^d through :func:`extend_eigenfunction`; at the
sample points the extension reproduces the eigenvector entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

GAUSSIAN = "gaussian"
EXPONENTIAL = "exponential"

#: Eigenvalues at or below this are treated as the empirical null space:
#: they are excluded from extension and from the clustering scan.
EIGENVALUE_FLOOR = 1e-10


@dataclass(frozen=True)
class KernelSpec:
    """A radial kernel family plus its bandwidth (in data length units)."""

    family: str
    bandwidth: float

    def __post_init__(self):
        if self.family not in (GAUSSIAN, EXPONENTIAL):
            raise InputError(f"unknown kernel family {self.family!r}")
        if not np.isfinite(self.bandwidth) or self.bandwidth <= 0.0:
            raise InputError(f"bandwidth must be positive and finite, got {self.bandwidth}")

    def profile(self, dist):
        """Kernel value as a function of distance, k(t) with k(0) = 1."""
        t = np.asarray(dist, dtype=float)
        if self.family == GAUSSIAN:
            return np.exp(-(t * t) / (2.0 * self.bandwidth**2))
        return np.exp(-t / self.bandwidth)


@dataclass(frozen=True)
class DataSet:
    """n points in d dimensions, optionally with ground-truth labels.

    ``points`` is coerced to a float array of shape (n, d); a 1-D input is
    treated as n scalar observations.  Labels are for evaluation only and
    never influence any algorithm in this package.
    """

    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InputError(f"points must be (n, d) with n, d >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InputError("points contain non-finite coordinates")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=int)
            if lab.shape != (pts.shape[0],):
                raise InputError("labels must be one integer per point")
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    """Dense Euclidean distance matrix with an exactly zero diagonal.

    Computed from coordinate differences (not the Gram identity) so that
    coincident points give exactly 0 and the result is bitwise symmetric.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _as_point(x, d: int) -> np.ndarray:
    p = np.asarray(x, dtype=float)
    if p.ndim == 0:
        p = p[None]
    if p.ndim == 1:
        if p.shape[0] != d:
            raise InputError(f"point has dimension {p.shape[0]}, expected {d}")
        return p[None, :]
    if p.ndim == 2 and p.shape[1] == d:
        return p
    raise InputError(f"point array has shape {p.shape}, expected (d,) or (m, {d})")


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Evaluate K(x, y); symmetric in its arguments, in (0, 1], and 1 iff x == y."""
    xa = np.asarray(x, dtype=float).ravel()
    ya = np.asarray(y, dtype=float).ravel()
    if xa.shape != ya.shape:
        raise InputError(f"dimension mismatch: {xa.shape} vs {ya.shape}")
    return float(spec.profile(np.linalg.norm(xa - ya)))


def kernel_matrix(spec: KernelSpec, data: DataSet, distances: np.ndarray | None = None):
    """Assemble the normalized kernel matrix with entries K(x_i, x_j) / n.

    Parameters
    ----------
    distances : ndarray, optional
        Precomputed output of :func:`pairwise_distances` for ``data.points``;
        pass it when the distances are shared with the bandwidth heuristic,
        the O(n^2 d) distance pass dominates runtime.

    Returns
    -------
    ndarray, shape (n, n)
        Symmetric, positive semi-definite up to round-off, diagonal exactly
        ``1/n`` and trace exactly 1.
    """
    if distances is None:
        distances = pairwise_distances(data.points)
    return spec.profile(distances) / data.n


def extend_eigenfunction(spec: KernelSpec, data: DataSet, eigpair, x):
    """Evaluate an eigenvector of the kernel matrix as a function at ``x``.

    The extension is ``(1 / (n * lam)) * sum_i K(x, x_i) v_i``.  Evaluated at
    a sample point ``x_j`` it reproduces ``v_j`` (to round-off), and away
    from the data it inherits the kernel's tail decay.

    Parameters
    ----------
    eigpair : (float, ndarray)
        An eigenvalue ``lam`` with its unit eigenvector ``v`` (length n).
        Near-null pairs (``lam <= 1e-10``) are numerical noise and rejected.
    x : array-like
        A single point (d,) or a stack of points (m, d).

    Returns
    -------
    float or ndarray
        The extension value(s); a scalar for a single point.
    """
    lam, v = eigpair
    lam = float(lam)
    if lam <= EIGENVALUE_FLOOR:
        raise InputError(f"eigenvalue {lam:.3e} is not above the floor {EIGENVALUE_FLOOR:.1e}")
    v = np.asarray(v, dtype=float)
    if v.shape != (data.n,):
        raise InputError(f"eigenvector has shape {v.shape}, expected ({data.n},)")
    pts = _as_point(x, data.d)
    diff = pts[:, None, :] - data.points[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    values = (spec.profile(dist) @ v) / (data.n * lam)
    if np.asarray(x).ndim <= 1:
        return float(values[0])
    return values
