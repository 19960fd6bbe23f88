"""Kalman analysis step: the analytic gain and the Joseph-form covariance update.

The Joseph form is the only covariance update exposed here because it stays
valid (symmetric, positive definite) for *any* finite gain matrix, optimal or
not, which is exactly what the gain optimizers in this package need.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve

from . import matrix_core
from .exceptions import DimensionMismatch, InvalidParameter

__all__ = [
    "FilterProblem",
    "innovation_covariance",
    "analytic_gain",
    "joseph_update",
]


@dataclass(frozen=True)
class FilterProblem:
    """Bundle of prior covariance, observation operator, and noise covariance.

    Attributes
    ----------
    prior : ndarray, shape (n, n)
        SPD error covariance of the state estimate before assimilation.
    obs_op : ndarray, shape (m, n)
        Linear(ized) observation operator mapping state to observation space.
        Any finite real matrix is accepted; full rank is not required.
    obs_noise : ndarray, shape (m, m)
        SPD observation error covariance.
    """

    prior: np.ndarray
    obs_op: np.ndarray
    obs_noise: np.ndarray
    state_dim: int = field(init=False)
    obs_dim: int = field(init=False)

    def __post_init__(self):
        prior = matrix_core.validate_covariance(self.prior, name="prior")
        obs_noise = matrix_core.validate_covariance(self.obs_noise, name="obs_noise")
        obs_op = np.asarray(self.obs_op, dtype=float)
        if obs_op.ndim != 2:
            raise DimensionMismatch(f"obs_op must be 2-D, got shape {obs_op.shape}")
        if not np.all(np.isfinite(obs_op)):
            raise InvalidParameter("obs_op contains non-finite entries")
        if obs_op.shape[1] != prior.shape[0]:
            raise DimensionMismatch(
                f"obs_op has {obs_op.shape[1]} columns but prior is "
                f"{prior.shape[0]}x{prior.shape[0]}")
        if obs_op.shape[0] != obs_noise.shape[0]:
            raise DimensionMismatch(
                f"obs_op has {obs_op.shape[0]} rows but obs_noise is "
                f"{obs_noise.shape[0]}x{obs_noise.shape[0]}")
        for name, value in (("prior", prior), ("obs_op", obs_op),
                            ("obs_noise", obs_noise)):
            value = value.copy()
            value.flags.writeable = False
            object.__setattr__(self, name, value)
        object.__setattr__(self, "state_dim", prior.shape[0])
        object.__setattr__(self, "obs_dim", obs_noise.shape[0])

    def check_gain(self, gain: np.ndarray, name: str = "gain") -> np.ndarray:
        """Validate a gain matrix against this problem's (n, m) shape."""
        gain = np.asarray(gain, dtype=float)
        if gain.shape != (self.state_dim, self.obs_dim):
            raise DimensionMismatch(
                f"{name} must have shape ({self.state_dim}, {self.obs_dim}), "
                f"got {gain.shape}")
        if not np.all(np.isfinite(gain)):
            raise InvalidParameter(f"{name} contains non-finite entries")
        return gain


def innovation_covariance(problem: FilterProblem) -> np.ndarray:
    """Covariance of the innovation: ``H @ P @ H.T + R``, symmetrized.

    SPD is guaranteed because the noise covariance is SPD and the projected
    prior term is positive semidefinite.
    """
    h = problem.obs_op
    s = h @ problem.prior @ h.T + problem.obs_noise
    return matrix_core.symmetrize(s)


def analytic_gain(problem: FilterProblem) -> np.ndarray:
    """Optimal gain ``P @ H.T @ inv(H @ P @ H.T + R)``, shape (n, m).

    The innovation covariance is never inverted explicitly; the gain comes
    from a Cholesky solve of ``S @ X = H @ P`` followed by a transpose, which
    is more accurate than forming the inverse.
    """
    s = innovation_covariance(problem)
    factor = matrix_core.cholesky(s)
    cross = problem.obs_op @ problem.prior  # (m, n); transpose of P H^T
    return cho_solve((factor, True), cross).T


def joseph_update(problem: FilterProblem, gain: np.ndarray) -> np.ndarray:
    """Posterior covariance ``(I - KH) P (I - KH).T + K R K.T``, symmetrized.

    Valid for any finite gain; the result stays SPD whenever the prior and
    noise covariances are SPD. No SPD validation is performed here; consumers
    that factorize the output (log-determinant, inverse) surface degeneracy
    as NotPositiveDefinite at that point.
    """
    gain = problem.check_gain(gain)
    ikh = np.eye(problem.state_dim) - gain @ problem.obs_op
    updated = ikh @ problem.prior @ ikh.T + gain @ problem.obs_noise @ gain.T
    return matrix_core.symmetrize(updated)
