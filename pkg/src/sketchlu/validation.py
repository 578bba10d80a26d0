"""Input validation helpers shared across the package."""

import numpy as np


class RankDeficiencyError(np.linalg.LinAlgError):
    """A block that must have full rank is numerically rank deficient."""

    def __init__(self, message, sigma_min=None):
        super().__init__(message)
        self.sigma_min = sigma_min


def check_matrix(A, name="A", min_rows=1, min_cols=1):
    """Coerce to a 2-d float64 array and reject non-finite entries."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={A.ndim}")
    if A.shape[0] < min_rows or A.shape[1] < min_cols:
        raise ValueError(f"{name} has shape {A.shape}, need at least ({min_rows}, {min_cols})")
    if not np.isfinite(A).all():
        raise ValueError(f"{name} contains non-finite entries")
    return A


def check_vector(x, name="x"):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got ndim={x.ndim}")
    if not np.isfinite(x).all():
        raise ValueError(f"{name} contains non-finite entries")
    return x


def check_rank_index(k, upper, name="k", lower=0):
    k = int(k)
    if not lower <= k <= upper:
        raise ValueError(f"{name}={k} out of range [{lower}, {upper}]")
    return k
