"""Dense real matrix kernels used by the spectral layer.

LU solve with partial pivoting, cyclic Jacobi for symmetric
eigenproblems, induced matrix norms and an orthonormal basis of the
transverse space {x : x^T 1 = 0}. Matrices here are small (N up to a few
hundred) so everything works on plain float64 numpy arrays.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np

from src.errors import (
    InvalidInput,
    NoConvergence,
    NonFiniteMatrix,
    NotSymmetric,
    ShapeMismatch,
    SingularMatrix,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Iterable]

PIVOT_TOLERANCE = 1e-13
SYMMETRY_TOLERANCE = 1e-12
JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class SymmetricSpectrum:
    """Eigenvalues sorted descending, eigenvectors as matching columns"""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])


def as_dense_matrix(data: ArrayLike, square: bool = False) -> np.ndarray:
    """Coerce input into a finite 2-D float64 array"""
    try:
        a = np.array(data, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise InvalidInput(f"Matrix entries must be real numbers: {str(e)}")

    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ShapeMismatch(f"Expected a non-empty 2-D matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"Expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteMatrix("Matrix contains NaN or infinite entries")
    return a


def matrix_one_norm(a: ArrayLike) -> float:
    """Induced 1-norm: maximum absolute column sum"""
    a = np.asarray(a, dtype=np.float64)
    return float(np.abs(a).sum(axis=0).max())


def max_abs(a: ArrayLike) -> float:
    a = np.asarray(a, dtype=np.float64)
    return float(np.abs(a).max()) if a.size else 0.0


def lu_factor(a: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Doolittle LU with partial pivoting, no singularity check.

    Returns the packed factors (unit lower part below the diagonal, U on
    and above) and the row permutation, so that a[perm] = L @ U.
    """
    lu = as_dense_matrix(a, square=True).copy()
    n = lu.shape[0]
    perm = np.arange(n)

    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        pivot = lu[k, k]
        if pivot == 0.0:
            continue
        lu[k + 1 :, k] /= pivot
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])

    return lu, perm


def lu_solve(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Solve a x = b by LU decomposition with partial pivoting"""
    a = as_dense_matrix(a, square=True)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    n = a.shape[0]
    if b.shape[0] != n:
        raise ShapeMismatch(f"Right-hand side has length {b.shape[0]}, expected {n}")

    lu, perm = lu_factor(a)
    threshold = PIVOT_TOLERANCE * matrix_one_norm(a)
    pivots = np.abs(np.diag(lu))
    if np.any(pivots < threshold) or np.any(pivots == 0.0):
        k = int(np.argmin(pivots))
        raise SingularMatrix(
            f"Pivot {k} has magnitude {pivots[k]:.3e} below {threshold:.3e}"
        )

    # forward substitution with unit lower factor
    y = b[perm].copy()
    for i in range(1, n):
        y[i] -= lu[i, :i] @ y[:i]

    x = np.empty(n)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - lu[i, i + 1 :] @ x[i + 1 :]) / lu[i, i]
    return x


def check_symmetric(s: ArrayLike) -> np.ndarray:
    s = as_dense_matrix(s, square=True)
    asym = max_abs(s - s.T)
    if asym > SYMMETRY_TOLERANCE * max_abs(s):
        raise NotSymmetric(f"Matrix is not symmetric (max |s - s^T| = {asym:.3e})")
    return s


def jacobi_eigen(s: ArrayLike) -> SymmetricSpectrum:
    """Symmetric eigendecomposition by cyclic Jacobi rotations"""
    a = check_symmetric(s).copy()
    n = a.shape[0]
    v = np.eye(n)
    target = JACOBI_TOLERANCE * float(np.linalg.norm(a, "fro"))

    def off_norm() -> float:
        return float(np.linalg.norm(a - np.diag(np.diag(a)), "fro"))

    converged = off_norm() <= target
    sweep = 0
    while not converged and sweep < JACOBI_MAX_SWEEPS:
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                sign = 1.0 if theta >= 0.0 else -1.0
                t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - sn * col_q
                a[:, q] = sn * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sn * row_q
                a[q, :] = sn * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - sn * vec_q
                v[:, q] = sn * vec_p + c * vec_q
        converged = off_norm() <= target

    if not converged:
        raise NoConvergence(
            f"Jacobi iteration did not converge after {JACOBI_MAX_SWEEPS} sweeps"
        )
    logger.debug(f"Jacobi converged after {sweep} sweeps for n={n}")

    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return SymmetricSpectrum(
        eigenvalues=eigenvalues[order], eigenvectors=v[:, order].copy()
    )


def spectral_norm_symmetric(s: ArrayLike) -> float:
    """Largest absolute eigenvalue of a symmetric matrix"""
    spectrum = jacobi_eigen(s)
    return float(np.abs(spectrum.eigenvalues).max())


def transverse_basis(n: int) -> np.ndarray:
    """Orthonormal rows spanning the complement of the all-ones vector.

    The Householder reflection H mapping 1/sqrt(n) to e_1 is symmetric and
    orthogonal, its first row is 1/sqrt(n); the remaining n-1 rows are the
    basis.
    """
    if n < 2:
        raise InvalidInput(f"Transverse space needs n >= 2, got {n}")

    u = np.full(n, 1.0 / np.sqrt(n))
    w = u.copy()
    w[0] -= 1.0
    h = np.eye(n) - 2.0 * np.outer(w, w) / (w @ w)
    return h[1:, :].copy()
