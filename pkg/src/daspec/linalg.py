"""Deterministic dense symmetric eigendecomposition.

Every spectral quantity in this package flows through :func:`eigendecompose`,
so its output has to be reproducible bit for bit: eigenvalues sorted in
descending order, unit-norm eigenvectors with a fixed sign convention, and a
hard residual check instead of a silent partial result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError

SYMMETRY_TOL = 1e-12
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (descending) and matching orthonormal eigenvectors.

    ``values[j]`` belongs to column ``vectors[:, j]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


def validate_symmetric(matrix, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Return ``matrix`` as a float array after checking it is usable.

    Raises
    ------
    InputError
        If the matrix is not square, contains non-finite entries, or is
        asymmetric beyond ``tol`` in absolute value.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        raise InputError("empty matrix")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix contains non-finite entries")
    skew = np.abs(a - a.T).max()
    if skew > tol:
        raise InputError(f"matrix is asymmetric by {skew:.3e} (tol {tol:.1e})")
    return a


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # Sign convention: the entry of largest absolute value in each column is
    # positive.  np.argmax takes the lowest index on exact ties.
    idx = np.argmax(np.abs(vectors), axis=0)
    pivot = vectors[idx, np.arange(vectors.shape[1])]
    signs = np.where(pivot < 0.0, -1.0, 1.0)
    return vectors * signs


def eigendecompose(matrix) -> EigenSystem:
    """Full eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    matrix : array-like, shape (n, n)
        Symmetric to within ``1e-12`` absolute, all entries finite.

    Returns
    -------
    EigenSystem
        Eigenvalues sorted descending; column ``j`` of ``vectors`` is the
        unit eigenvector for ``values[j]``.  The output is bit-identical
        for bit-identical input.

    Raises
    ------
    InputError
        On invalid input (see :func:`validate_symmetric`).
    NumericalError
        If the backend fails to converge or the residual
        ``max_j ||A v_j - w_j v_j||`` exceeds ``1e-8``.
    """
    a = validate_symmetric(matrix)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition did not converge: {exc}") from exc
    # eigh returns ascending order; reverse to descending.
    w = w[::-1].copy()
    v = _fix_signs(v[:, ::-1]).copy()

    residuals = np.linalg.norm(a @ v - v * w, axis=0)
    worst = float(residuals.max())
    if worst > RESIDUAL_TOL:
        raise NumericalError(
            f"eigendecomposition residual {worst:.3e} exceeds {RESIDUAL_TOL:.1e}",
            worst_residual=worst,
        )
    return EigenSystem(values=w, vectors=v)
