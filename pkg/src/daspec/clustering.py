"""The DaSpec clustering algorithm with data-driven parameter heuristics.

Pipeline: build the normalized Gaussian kernel matrix, eigendecompose it,
then scan the eigenvectors in descending-eigenvalue order and keep those
with no sign change up to a per-vector precision.  Each kept eigenvector
witnesses one separable high-density component, so their count estimates
the number of groups and each point is labeled by the kept eigenvector
with the largest absolute entry there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaincinv

from . import kernels
from .errors import DegenerateDataError, InputError
from .kernels import DataSet, KernelSpec
from .linalg import EigenSystem, eigendecompose


@dataclass(frozen=True)
class DaSpecParams:
    """Algorithm parameters; ``None`` means resolve from the data.

    bandwidth
        Gaussian kernel bandwidth; ``None`` selects it with
        :func:`select_bandwidth`.
    epsilon
        Fixed no-sign-change precision; ``None`` applies the per-eigenvector
        rule ``eps_j = max_i |v_j(i)| / n``.
    eigenvalue_floor
        Eigenpairs at or below this are skipped as empirical null space.
    """

    bandwidth: float | None = None
    epsilon: float | None = None
    eigenvalue_floor: float = kernels.EIGENVALUE_FLOOR

    def __post_init__(self):
        if self.bandwidth is not None and (
            not np.isfinite(self.bandwidth) or self.bandwidth <= 0.0
        ):
            raise InputError(f"explicit bandwidth must be positive, got {self.bandwidth}")
        if self.epsilon is not None and (not np.isfinite(self.epsilon) or self.epsilon <= 0.0):
            raise InputError(f"fixed epsilon must be positive, got {self.epsilon}")
        if self.eigenvalue_floor <= 0.0:
            raise InputError("eigenvalue_floor must be positive")


@dataclass(frozen=True)
class ClusterResult:
    """Output of :func:`cluster`.

    g_hat
        Estimated number of separable groups (>= 1 for nonempty data).
    selected_indices
        Positions (strictly increasing) of the kept eigenvectors in the
        descending spectrum.
    selected_eigenvalues, selected_epsilons, selected_vectors
        Eigenvalue, no-sign-change precision, and eigenvector (as columns)
        for each kept index.
    labels
        One label in ``1..g_hat`` per point.
    params_used
        Input parameters with the bandwidth resolved to a number.
    """

    g_hat: int
    selected_indices: np.ndarray
    selected_eigenvalues: np.ndarray
    selected_epsilons: np.ndarray
    selected_vectors: np.ndarray
    labels: np.ndarray
    params_used: DaSpecParams


def chi_square_quantile(p: float, dof: int) -> float:
    """Quantile of the chi-square distribution with ``dof`` degrees of freedom.

    Computed by numeric inversion of the regularized lower incomplete gamma
    function (chi-square with d degrees of freedom is Gamma(d/2, scale 2)).
    """
    if not 0.0 < p < 1.0:
        raise InputError(f"quantile level must be in (0, 1), got {p}")
    if dof < 1:
        raise InputError(f"degrees of freedom must be >= 1, got {dof}")
    return float(2.0 * gammaincinv(0.5 * dof, p))


def _nearest_rank(sorted_values: np.ndarray, p: float):
    # Nearest-rank quantile: the order statistic at position ceil(p * m),
    # 1-indexed.  round() guards the exact-integer case against binary
    # round-off (e.g. 0.95 * 20 evaluating to 19.000000000000004).
    m = sorted_values.shape[0]
    rank = math.ceil(round(p * m, 9))
    return sorted_values[rank - 1]


def select_bandwidth(data: DataSet, distances: np.ndarray | None = None) -> float:
    """Data-driven Gaussian bandwidth.

    For each point, ``q_i`` is the 5% nearest-rank quantile of its distances
    to the other n-1 points (the zero self-distance is excluded, otherwise
    the quantile collapses to zero for small n).  The bandwidth is the 95%
    quantile of the ``q_i`` divided by the square root of the 95% chi-square
    quantile with d degrees of freedom, which keeps roughly 5% of the sample
    inside the kernel's effective range for 95% of the points.

    Raises
    ------
    InputError
        If the data has fewer than two points.
    DegenerateDataError
        If the selected quantile is zero (e.g. all points identical).
    """
    if data.n < 2:
        raise InputError("bandwidth selection needs at least two points")
    if distances is None:
        distances = kernels.pairwise_distances(data.points)
    # Row-sort puts each point's zero self-distance first; drop that column.
    neighbor = np.sort(distances, axis=1)[:, 1:]
    q = np.array([_nearest_rank(row, 0.05) for row in neighbor])
    numerator = float(_nearest_rank(np.sort(q), 0.95))
    if numerator <= 0.0:
        raise DegenerateDataError("degenerate data: selected neighbor quantile is zero")
    return numerator / math.sqrt(chi_square_quantile(0.95, data.d))


def select_epsilon(v: np.ndarray, n: int) -> float:
    """Per-eigenvector no-sign-change precision, ``max_i |v_i| / n``."""
    v = np.asarray(v, dtype=float)
    peak = float(np.abs(v).max())
    if peak == 0.0:
        raise InputError("epsilon rule is undefined for the zero vector")
    return peak / n


def has_no_sign_change(v: np.ndarray, eps: float) -> bool:
    """True iff all entries exceed ``-eps`` or all entries are below ``eps``."""
    if not eps > 0.0:
        raise InputError(f"precision must be positive, got {eps}")
    v = np.asarray(v, dtype=float)
    return bool(v.min() > -eps or v.max() < eps)


def _scan_eigenvectors(eig: EigenSystem, n: int, params: DaSpecParams):
    """Indices, eigenvalues and precisions of the no-sign-change eigenvectors.

    Scans in descending-eigenvalue order and stops at the eigenvalue floor.
    Selecting nothing signals a numerical fault (the top eigenvector of a
    positive kernel matrix cannot genuinely change sign), never a valid
    "zero groups" answer.
    """
    selected = []
    for j in range(eig.n):
        if eig.values[j] <= params.eigenvalue_floor:
            break
        v = eig.vectors[:, j]
        eps = params.epsilon if params.epsilon is not None else select_epsilon(v, n)
        if has_no_sign_change(v, eps):
            selected.append((j, float(eig.values[j]), float(eps)))
    if not selected:
        raise DegenerateDataError(
            "no eigenvector passed the no-sign-change scan; "
            "this indicates a numerical fault or an unusable epsilon"
        )
    return selected


def cluster(data: DataSet, params: DaSpecParams | None = None) -> ClusterResult:
    """Run DaSpec: estimate the number of groups and label every point.

    Parameters
    ----------
    data : DataSet
        At least one point.
    params : DaSpecParams, optional
        Defaults to fully data-driven parameters.

    Returns
    -------
    ClusterResult
        ``g_hat >= 1`` with labels in ``1..g_hat``.  Ties in the labeling
        argmax break toward the eigenvector with the larger eigenvalue.
    """
    if params is None:
        params = DaSpecParams()
    # Distances are computed once and shared between the bandwidth heuristic
    # and the kernel matrix; this O(n^2 d) pass dominates the runtime.
    distances = kernels.pairwise_distances(data.points)
    if params.bandwidth is not None:
        bandwidth = params.bandwidth
    elif data.n == 1:
        # Any bandwidth yields the 1x1 matrix [1].
        bandwidth = 1.0
    else:
        bandwidth = select_bandwidth(data, distances)

    spec = KernelSpec(kernels.GAUSSIAN, bandwidth)
    eig = eigendecompose(kernels.kernel_matrix(spec, data, distances))
    selected = _scan_eigenvectors(eig, data.n, params)

    idx = np.array([s[0] for s in selected], dtype=int)
    values = np.array([s[1] for s in selected])
    epsilons = np.array([s[2] for s in selected])
    vectors = eig.vectors[:, idx]
    # Step 3: label by the largest-magnitude kept eigenvector; np.argmax
    # returns the first maximum, i.e. the larger eigenvalue on exact ties.
    labels = np.argmax(np.abs(vectors), axis=1) + 1
    return ClusterResult(
        g_hat=len(selected),
        selected_indices=idx,
        selected_eigenvalues=values,
        selected_epsilons=epsilons,
        selected_vectors=vectors,
        labels=labels,
        params_used=replace(params, bandwidth=bandwidth),
    )


def classify(result: ClusterResult, data: DataSet, spec: KernelSpec, x):
    """Label new points with an existing clustering.

    Each kept eigenvector extends to a function via the kernel; a point is
    assigned to the extension with the largest absolute value there.  For a
    training point this reproduces the stored label exactly.

    Parameters
    ----------
    result : ClusterResult
        Must have been produced from ``data`` with this kernel's bandwidth.
    x : array-like
        A single point (d,) or a stack (m, d).

    Returns
    -------
    int or ndarray
        Label(s) in ``1..g_hat``.
    """
    if result.selected_vectors.shape[0] != data.n:
        raise InputError("result does not match the dataset it was trained on")
    single = np.asarray(x).ndim <= 1
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    phis = np.empty((pts.shape[0], result.g_hat))
    for g in range(result.g_hat):
        pair = (result.selected_eigenvalues[g], result.selected_vectors[:, g])
        phis[:, g] = kernels.extend_eigenfunction(spec, data, pair, pts)
    labels = np.argmax(np.abs(phis), axis=1) + 1
    if single:
        return int(labels[0])
    return labels
