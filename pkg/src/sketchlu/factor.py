"""Low-rank factorization algorithms built on two-sided sketching.

Five routines produce a factorization object whose reconstruction
approximates A:

* ``glu``     -- rectangular-block LU with sketches on both sides; the
                 approximation deletes the generalized Schur complement.
* ``rlu``     -- the square special case (equal sketch sizes on both sides).
* ``rqr``     -- projection onto the range of A V1 (QR-based).
* ``prr_rlu`` -- column sketch followed by rank-revealing row selection.
* ``cw``      -- the two-sided pseudo-inverse form A V1 (U1 A V1)^+ U1 A.

Sketches may be passed either as :class:`~sketchlu.sketch.SketchOperator`
instances or as plain dense matrices (left sketches as lp x m, right
factors as n x l).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import sketch as sk
from .validation import RankDeficiencyError, check_matrix, check_vector


def _as_left_op(U1, m):
    if isinstance(U1, sk.SketchOperator):
        if U1.in_dim != m:
            raise ValueError(f"left sketch acts on dimension {U1.in_dim}, matrix has {m} rows")
        return U1
    U1 = check_matrix(U1, name="U1")
    if U1.shape[1] != m:
        raise ValueError(f"left sketch must have {m} columns, got {U1.shape}")
    return sk.explicit_sketch(U1)


def _as_right_op(V1, n):
    if isinstance(V1, sk.SketchOperator):
        if V1.in_dim != n:
            raise ValueError(f"right sketch acts on dimension {V1.in_dim}, matrix has {n} columns")
        return V1
    V1 = check_matrix(V1, name="V1")
    if V1.shape[0] != n:
        raise ValueError(f"right factor must have {n} rows, got {V1.shape}")
    return sk.explicit_sketch(V1.T)


def _require_full_column_rank(M, what):
    s = np.linalg.svd(M, compute_uv=False)
    tol = max(M.shape) * np.finfo(np.float64).eps * (s[0] if s.size else 0.0)
    if M.shape[0] < M.shape[1] or s.size == 0 or s[-1] <= tol:
        raise RankDeficiencyError(
            f"{what} is rank deficient (sigma_min={0.0 if s.size == 0 else s[-1]:.3e})",
            sigma_min=float(s[-1]) if s.size else 0.0,
        )


@dataclass(frozen=True)
class GluFactorization:
    """A low-rank factorization A ~ T S, optionally through a small middle block.

    ``mid`` is None when the product is plain ``T @ S``; for ``rlu`` it holds
    the invertible l x l core (reconstruction is ``T inv(mid) S``) and for
    ``cw`` the lp x l core (reconstruction is ``T pinv(mid) S``).  ``dims``
    records (m, n, k, l, lp); ``sketches`` the (left, right) descriptors used,
    with derived operators recorded where the algorithm constructs its own.
    """

    T: np.ndarray
    S: np.ndarray
    algo: str
    mid: np.ndarray | None
    sketches: tuple
    dims: tuple

    def _mid_solve(self, B):
        if self.mid is None:
            return B
        if self.algo == "rlu":
            return np.linalg.solve(self.mid, B)
        return np.linalg.pinv(self.mid) @ B

    def reconstruct(self):
        """Densify the approximation."""
        return self.T @ self._mid_solve(self.S)

    def apply(self, x):
        """Matrix-vector product with the approximation, never densifying."""
        x = check_vector(x)
        if x.shape[0] != self.dims[1]:
            raise ValueError(f"vector has length {x.shape[0]}, expected {self.dims[1]}")
        return self.T @ self._mid_solve(self.S @ x)


def _check_oversampling(k, l, lp):
    if not 1 <= l <= lp:
        raise ValueError(f"need lp >= l >= 1, got l={l}, lp={lp}")
    if k is not None and not 1 <= k <= l:
        raise ValueError(f"need l >= k >= 1, got k={k}, l={l}")


def glu(A, U1, V1, k=None):
    """Two-sided sketched LU approximation with a rectangular leading block.

    U1 compresses rows (lp x m) and V1 columns (n x l) with lp >= l.  With
    ``Ah = U1 A V1`` (which must have full column rank), the factors are

        T = pinv(U1) (I - Ah pinv(Ah)) + (A V1) pinv(Ah),   S = U1 A,

    and ``T @ S`` deletes the generalized Schur complement of ``Ah`` from the
    doubly sketched matrix.  For srht sketches pinv(U1) is applied through
    the fast transform (scaled adjoint); when the row dimension is padded the
    adjoint acts on the zero-padded domain, which factors the zero-padded
    matrix and leaves every residual bound intact.
    """
    A = check_matrix(A)
    m, n = A.shape
    U1op = _as_left_op(U1, m)
    V1op = _as_right_op(V1, n)
    l, lp = V1op.out_dim, U1op.out_dim
    _check_oversampling(k, l, lp)
    AV = V1op.apply_right(A)
    Ah = U1op.apply_left(AV)
    _require_full_column_rank(Ah, f"U1 A V1 ({lp} x {l})")
    Ahp = np.linalg.pinv(Ah)
    T = U1op.apply_pinv(np.eye(lp) - Ah @ Ahp) + AV @ Ahp
    S = U1op.apply_left(A)
    return GluFactorization(T, S, "glu", None, (U1op, V1op), (m, n, k, l, lp))


def rlu(A, U1, V1, k=None):
    """Square-core sketched LU: factors T = A V1, S = U1 A, mid = U1 A V1.

    The l x l core must be invertible; the reconstruction is
    ``A V1 inv(U1 A V1) U1 A``.
    """
    A = check_matrix(A)
    m, n = A.shape
    U1op = _as_left_op(U1, m)
    V1op = _as_right_op(V1, n)
    if U1op.out_dim != V1op.out_dim:
        raise ValueError(f"rlu needs equal sketch sizes, got {U1op.out_dim} and {V1op.out_dim}")
    l = V1op.out_dim
    _check_oversampling(k, l, l)
    T = V1op.apply_right(A)
    S = U1op.apply_left(A)
    Ah = U1op.apply_left(T)
    _require_full_column_rank(Ah, f"U1 A V1 ({l} x {l})")
    return GluFactorization(T, S, "rlu", Ah, (U1op, V1op), (m, n, k, l, l))


def rqr(A, V1, k=None):
    """Projection onto the sketched range: T = orthonormal basis of A V1, S = T' A."""
    A = check_matrix(A)
    m, n = A.shape
    V1op = _as_right_op(V1, n)
    l = V1op.out_dim
    _check_oversampling(k, l, l)
    AV = V1op.apply_right(A)
    _require_full_column_rank(AV, f"A V1 ({m} x {l})")
    Q, _ = np.linalg.qr(AV, mode="reduced")
    S = Q.T @ A
    return GluFactorization(Q, S, "rqr", None, (None, V1op), (m, n, k, l, l))


def row_select(Q, f=2.0, max_swaps=None):
    """Select l well-conditioned rows of an m x l full-column-rank matrix.

    Starts from the pivoted QR of Q.T (greedy volume maximization), then
    swaps rows while any coefficient of ``Q[rest] inv(Q[sel])`` exceeds f in
    magnitude.  Each swap grows |det Q[sel]| by more than f >= 1, so the loop
    terminates; a guard of m*l swaps protects against numerical stalls.
    Returns the selected row indices (length l).
    """
    Q = check_matrix(Q)
    m, l = Q.shape
    if f < 1.0:
        raise ValueError("f must be >= 1")
    _require_full_column_rank(Q, f"row_select input ({m} x {l})")
    if m == l:
        return np.arange(l)
    _, _, piv = scipy.linalg.qr(Q.T, pivoting=True, mode="economic")
    selected = np.array(piv[:l], dtype=np.intp)
    rest = np.array([i for i in range(m) if i not in set(selected.tolist())], dtype=np.intp)
    limit = m * l if max_swaps is None else max_swaps
    for _ in range(limit):
        try:
            C = np.linalg.solve(Q[selected].T, Q[rest].T).T
        except np.linalg.LinAlgError as exc:
            raise RankDeficiencyError(f"selected row block became singular: {exc}") from exc
        i, j = np.unravel_index(np.argmax(np.abs(C)), C.shape)
        if abs(C[i, j]) <= f:
            return selected
        selected[j], rest[i] = rest[i], selected[j]
    raise RuntimeError(f"row selection did not settle within {limit} swaps (f={f})")


def prr_rlu(A, V1, k=None, f=2.0):
    """Column sketch plus rank-revealing row selection.

    Selects l rows through :func:`row_select` on the orthonormal basis of
    A V1, then forms T = A V1 inv(P1 A V1) (computed stably from the basis)
    and S = P1 A.  Equivalent to :func:`rlu` with the selection as the left
    sketch.
    """
    A = check_matrix(A)
    m, n = A.shape
    V1op = _as_right_op(V1, n)
    l = V1op.out_dim
    _check_oversampling(k, l, l)
    AV = V1op.apply_right(A)
    _require_full_column_rank(AV, f"A V1 ({m} x {l})")
    Q, _ = np.linalg.qr(AV, mode="reduced")
    selected = row_select(Q, f=f)
    # T = A V1 inv(P1 A V1) = Q inv(P1 Q); the orthonormal form is better conditioned
    T = np.linalg.solve(Q[selected].T, Q.T).T
    S = A[selected].copy()
    P1op = sk.row_selection_sketch(selected, m)
    return GluFactorization(T, S, "prr_rlu", None, (P1op, V1op), (m, n, k, l, l))


def cw(A, U1, V1, k=None):
    """Two-sided pseudo-inverse factorization A V1 pinv(U1 A V1) U1 A.

    Defined for any sketches (no rank requirement); coincides with ``rlu``
    when the core is square and invertible, and is never more accurate than
    ``glu`` on the same sketches.
    """
    A = check_matrix(A)
    m, n = A.shape
    U1op = _as_left_op(U1, m)
    V1op = _as_right_op(V1, n)
    l, lp = V1op.out_dim, U1op.out_dim
    _check_oversampling(k, l, lp)
    T = V1op.apply_right(A)
    S = U1op.apply_left(A)
    Ah = U1op.apply_left(T)
    return GluFactorization(T, S, "cw", Ah, (U1op, V1op), (m, n, k, l, lp))


_ALGOS = {"glu": glu, "rlu": rlu, "rqr": rqr, "prr_rlu": prr_rlu, "cw": cw}


def factorize(A, algo, U1=None, V1=None, k=None):
    """Dispatch to one of the five algorithms by tag."""
    if algo not in _ALGOS:
        raise ValueError(f"unknown algorithm {algo!r}; expected one of {sorted(_ALGOS)}")
    if algo in ("rqr", "prr_rlu"):
        return _ALGOS[algo](A, V1, k=k)
    return _ALGOS[algo](A, U1, V1, k=k)
