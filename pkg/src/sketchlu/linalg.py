"""Dense linear-algebra kernels the rest of the package builds on.

Factorizations are LAPACK-backed but wrapped behind fixed conventions so that
results are deterministic for a fixed input:

* QR results carry a nonnegative diagonal on R (sign-fixed), which makes the
  Q factor unique for full-column-rank input.  Equivalence tests elsewhere in
  the package rely on this.
* Singular values are always returned in descending order.
* The pseudo-inverse cutoff defaults to ``max(m, n) * eps * sigma_max``.
"""

import numpy as np

from .validation import RankDeficiencyError, check_matrix, check_rank_index

from typing import NamedTuple


class QrResult(NamedTuple):
    Q: np.ndarray
    R: np.ndarray
    thin: bool


class SvdResult(NamedTuple):
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    thin: bool


def _signfix(Q, R):
    # flip signs so diag(R) >= 0; makes the factorization unique
    d = np.sign(np.diagonal(R).copy())
    d[d == 0] = 1.0
    r = d.shape[0]
    Q[:, :r] *= d
    R[:r, :] *= d[:, None]
    return Q, R


def thin_qr(A):
    """Thin QR of an m x n matrix with m >= n: Q is m x n, R is n x n."""
    A = check_matrix(A)
    m, n = A.shape
    if m < n:
        raise ValueError(f"thin_qr needs rows >= cols, got {m} x {n}")
    Q, R = np.linalg.qr(A, mode="reduced")
    Q, R = _signfix(Q, R)
    return QrResult(Q, R, thin=True)


def full_qr(A):
    """Square QR: Q is m x m orthogonal, R is m x n upper trapezoidal."""
    A = check_matrix(A)
    Q, R = np.linalg.qr(A, mode="complete")
    Q, R = _signfix(Q, R)
    return QrResult(Q, R, thin=False)


def svd(A, thin=True):
    """SVD with descending singular values.

    Thin: U is m x r, V is n x r with r = min(m, n).  Full: U is m x m and
    V is n x n.  ``V`` holds right singular vectors as columns, so
    ``A = U @ diag(sigma) @ V.T`` (with rectangular padding in the full case).
    LAPACK convergence failures propagate as ``LinAlgError`` rather than
    returning silently.
    """
    A = check_matrix(A)
    U, s, Vt = np.linalg.svd(A, full_matrices=not thin)
    return SvdResult(U, s, Vt.T, thin=thin)


def singular_values(A):
    A = check_matrix(A)
    return np.linalg.svd(A, compute_uv=False)


def sigma_at(s, j):
    """j-th singular value (1-indexed) from a descending array, 0 past the end."""
    s = np.asarray(s)
    return float(s[j - 1]) if 1 <= j <= s.shape[0] else 0.0


def pinv(A, tol=None):
    """Moore-Penrose pseudo-inverse via SVD.

    Singular values at or below ``tol`` are dropped.  Default
    ``tol = max(m, n) * eps * sigma_max``.
    """
    A = check_matrix(A)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if tol is None:
        tol = max(A.shape) * np.finfo(np.float64).eps * (s[0] if s.size else 0.0)
    elif tol < 0:
        raise ValueError("tol must be nonnegative")
    inv = np.where(s > tol, np.divide(1.0, s, where=s > 0), 0.0)
    return (Vt.T * inv) @ U.T


def truncated_svd(A, k):
    """Best rank-k approximation (sum of the leading k singular triplets)."""
    A = check_matrix(A)
    k = check_rank_index(k, min(A.shape), name="k")
    if k == 0:
        return np.zeros_like(A)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    return (U[:, :k] * s[:k]) @ Vt[:k]


def svd_tail(A, r):
    """A minus its best rank-r approximation (one SVD, trailing triplets)."""
    A = check_matrix(A)
    r = check_rank_index(r, min(A.shape), name="r")
    if r == 0:
        return A.copy()
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    s = s.copy()
    s[:r] = 0.0
    return (U * s) @ Vt


def generalized_schur_complement(A, lp, l):
    """Schur complement of the rectangular leading lp x l block.

    Returns ``A22 - A21 pinv(A11) A12`` of shape (m - lp) x (n - l).  The
    leading block must have full column rank, so lp >= l is required.
    """
    A = check_matrix(A)
    m, n = A.shape
    if not (1 <= l <= lp):
        raise ValueError(f"need lp >= l >= 1, got lp={lp}, l={l}")
    if lp >= m or l >= n:
        raise ValueError(f"block ({lp}, {l}) leaves an empty complement in {m} x {n}")
    A11 = A[:lp, :l]
    s = np.linalg.svd(A11, compute_uv=False)
    tol = max(lp, l) * np.finfo(np.float64).eps * s[0] if s[0] > 0 else 0.0
    if s[-1] <= tol:
        raise RankDeficiencyError(
            f"leading {lp} x {l} block is rank deficient (sigma_min={s[-1]:.3e})",
            sigma_min=float(s[-1]),
        )
    return A[lp:, l:] - A[lp:, :l] @ (pinv(A11) @ A[:lp, l:])
