"""Dense SPD matrix utilities: validation, Cholesky, determinants, inverses.

Determinant, log-determinant, inverse, and positive-definiteness checks all
route through a single Cholesky factorization so that there is one source of
truth for what counts as a valid covariance matrix.
"""

import numpy as np
from scipy.linalg import cho_solve

from .exceptions import DimensionMismatch, InvalidParameter, NotPositiveDefinite

__all__ = [
    "SYMMETRY_TOL",
    "PD_TOL",
    "check_square",
    "check_symmetric",
    "validate_covariance",
    "cholesky",
    "log_det",
    "det",
    "inverse",
    "trace",
    "symmetrize",
    "frobenius_norm",
    "random_spd",
]

# Relative symmetry tolerance and absolute Cholesky pivot floor. Both sit
# comfortably above double-precision noise for the dimensions this package
# targets (up to a few dozen).
SYMMETRY_TOL = 1e-9
PD_TOL = 1e-12


def check_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a float ndarray, raising DimensionMismatch if not square."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def check_symmetric(a: np.ndarray, tol: float = SYMMETRY_TOL,
                    name: str = "matrix") -> np.ndarray:
    """Validate entrywise symmetry of a square matrix.

    An entry pair (i, j), (j, i) is accepted when their difference is within
    ``tol * max(1, |a[i, j]|)``.
    """
    a = check_square(a, name)
    if not np.all(np.isfinite(a)):
        raise InvalidParameter(f"{name} contains non-finite entries")
    bound = tol * np.maximum(1.0, np.abs(a))
    if not np.all(np.abs(a - a.T) <= bound):
        worst = float(np.max(np.abs(a - a.T)))
        raise InvalidParameter(
            f"{name} is not symmetric to tolerance {tol:g} "
            f"(max asymmetry {worst:.3e})")
    return a


def cholesky(a: np.ndarray, pd_tol: float = PD_TOL) -> np.ndarray:
    """Lower-triangular Cholesky factor of a symmetric positive-definite matrix.

    Parameters
    ----------
    a : ndarray, shape (n, n)
        Symmetric matrix to factor.
    pd_tol : float, optional
        Absolute floor every pivot (diagonal entry of the factor) must exceed.

    Returns
    -------
    ndarray, shape (n, n)
        Lower factor L with ``L @ L.T`` reconstructing ``a``.

    Raises
    ------
    NotPositiveDefinite
        If factorization breaks down or any pivot is at or below ``pd_tol``,
        signalling that the input is not a valid covariance.
    """
    a = check_symmetric(a)
    try:
        factor = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"matrix is not positive definite: {exc}") from exc
    pivots = np.diag(factor)
    if np.any(pivots <= pd_tol):
        raise NotPositiveDefinite(
            f"Cholesky pivot {float(pivots.min()):.3e} at or below floor {pd_tol:g}")
    return factor


def validate_covariance(a: np.ndarray, name: str = "covariance") -> np.ndarray:
    """Check the covariance-matrix invariants (symmetry, positive definiteness).

    Returns the validated array unchanged so the call can be used inline.
    """
    a = check_symmetric(a, name=name)
    try:
        cholesky(a)
    except NotPositiveDefinite as exc:
        raise NotPositiveDefinite(f"{name}: {exc}") from exc
    return a


def log_det(a: np.ndarray) -> float:
    """Log-determinant of an SPD matrix, computed from its Cholesky pivots.

    Summing logs of the pivots avoids the overflow/underflow a det-then-log
    evaluation would hit on ill-conditioned inputs.
    """
    factor = cholesky(a)
    return 2.0 * float(np.sum(np.log(np.diag(factor))))


def det(a: np.ndarray) -> float:
    """Determinant of an SPD matrix; strictly positive."""
    return float(np.exp(log_det(a)))


def inverse(a: np.ndarray) -> np.ndarray:
    """Inverse of an SPD matrix via its Cholesky factorization.

    The result is symmetrized before return and is itself SPD.
    """
    factor = cholesky(a)
    inv = cho_solve((factor, True), np.eye(a.shape[0]))
    return symmetrize(inv)


def trace(a: np.ndarray) -> float:
    """Sum of the diagonal entries of a square matrix."""
    a = check_square(a)
    return float(np.trace(a))


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Arithmetic mean of a square matrix and its transpose; idempotent."""
    a = check_square(a)
    return (a + a.T) / 2.0


def frobenius_norm(a: np.ndarray) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(np.asarray(a, dtype=float)))


def random_spd(dim: int, seed: int, cond_target: float = 10.0) -> np.ndarray:
    """Seeded random SPD matrix with a controlled condition number.

    Draws a standard-Gaussian matrix, takes the orthogonal factor Q of its QR
    decomposition (sign-fixed for uniqueness), and assembles ``Q @ diag(w) @ Q.T``
    where the eigenvalues ``w`` are log-uniformly spaced on
    ``[1/sqrt(cond_target), sqrt(cond_target)]``. The spectrum has geometric
    mean 1, so outputs are unit-scale regardless of conditioning.

    Parameters
    ----------
    dim : int
        Matrix dimension, at least 1.
    seed : int
        Seed for the generator; identical arguments give bit-identical output.
    cond_target : float, optional
        Ratio of the extreme eigenvalues; must be >= 1.

    Returns
    -------
    ndarray, shape (dim, dim)
        A matrix passing ``validate_covariance``.
    """
    if dim < 1:
        raise InvalidParameter(f"dim must be >= 1, got {dim}")
    if not np.isfinite(cond_target) or cond_target < 1.0:
        raise InvalidParameter(f"cond_target must be >= 1, got {cond_target}")
    rng = np.random.default_rng(seed)
    gauss = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(gauss)
    q = q * np.where(np.diag(r) >= 0.0, 1.0, -1.0)
    # Exponents symmetric around 0 make the eigenvalue geometric mean exactly 1;
    # dim == 1 degenerates to a single unit eigenvalue.
    exponents = (np.arange(dim) - (dim - 1) / 2.0) / max(dim - 1, 1)
    eigenvalues = cond_target ** exponents
    return symmetrize((q * eigenvalues) @ q.T)
