"""Numerical verification of the deterministic inequalities and identities
behind the sketched LU/QR approximations, plus the gamma quality metrics.

Every check is reported as a :class:`BoundReport` rather than asserted here;
callers (tests, CLI) decide what to do with a failed report.  For inequality
reports ``holds`` allows slack down to ``-tol * scale`` as floating-point
headroom; identity-style reports store the measured residual as ``lhs`` and
the tolerance as ``rhs``.
"""

import math

from dataclasses import dataclass

import numpy as np

from . import factor as fx
from . import sketch as sk
from .linalg import full_qr, pinv, sigma_at, svd_tail
from .validation import RankDeficiencyError, check_matrix

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class BoundReport:
    """One verified comparison lhs <= rhs (or residual <= tolerance)."""

    name: str
    lhs: float
    rhs: float
    scale: float = 1.0
    tol: float = 1e-8

    @property
    def slack(self):
        return self.rhs - self.lhs

    @property
    def holds(self):
        return self.slack >= -self.tol * self.scale

    def csv_row(self):
        return f"{self.name},{self.lhs:.17g},{self.rhs:.17g},{self.slack:.17g},{str(self.holds).lower()}"


CSV_HEADER = "name,lhs,rhs,slack,holds"


def write_reports(path, reports):
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in reports:
            fh.write(r.csv_row() + "\n")


def _dense_left(U1):
    return U1.to_dense() if isinstance(U1, sk.SketchOperator) else check_matrix(U1, name="U1")


def _dense_right(V1):
    return V1.to_dense().T if isinstance(V1, sk.SketchOperator) else check_matrix(V1, name="V1")


@dataclass(frozen=True)
class SquareExtension:
    """Square invertible completions of a left sketch and a right factor.

    ``U`` stacks the given rows over an orthonormal basis of their orthogonal
    complement, so ``U = blockdiag(L11, I) @ Uprime`` with ``Uprime``
    orthogonal and ``L11`` lower triangular.  Symmetrically
    ``V = Vprime @ blockdiag(R11p, I)`` with ``Vprime`` orthogonal and
    ``R11p`` upper triangular; the leading columns of ``V`` are the given
    factor exactly.
    """

    U: np.ndarray
    V: np.ndarray
    L11: np.ndarray
    R11p: np.ndarray
    Uprime: np.ndarray
    Vprime: np.ndarray


def _require_rank(M, r, what):
    s = np.linalg.svd(M, compute_uv=False)
    if s.size < r or s[r - 1] <= max(M.shape) * _EPS * s[0]:
        raise RankDeficiencyError(
            f"{what} must have rank {r} (sigma_min={s[min(r, s.size) - 1]:.3e})",
            sigma_min=float(s[min(r, s.size) - 1]),
        )


def _extend_left(U1):
    lp, m = U1.shape
    if lp > m:
        raise ValueError("left sketch has more rows than the ambient dimension")
    _require_rank(U1, lp, f"U1 ({lp} x {m})")
    Qu, Ru = _signed_complete_qr(U1.T)
    Uprime = Qu.T
    L11 = Ru[:lp, :lp].T
    U = np.vstack([U1, Uprime[lp:]])
    return U, Uprime, L11


def _extend_right(V1):
    n, l = V1.shape
    if l > n:
        raise ValueError("right factor has more columns than the ambient dimension")
    _require_rank(V1, l, f"V1 ({n} x {l})")
    Qv, Rv = _signed_complete_qr(V1)
    R11p = Rv[:l, :l]
    V = np.hstack([V1, Qv[:, l:]])
    return V, Qv, R11p


def extend_square(U1, V1):
    """Complete U1 (lp x m, full row rank) and V1 (n x l, full column rank)
    to square invertible matrices whose trailing rows/columns are orthonormal
    complements."""
    U, Uprime, L11 = _extend_left(_dense_left(U1))
    V, Vprime, R11p = _extend_right(_dense_right(V1))
    return SquareExtension(U, V, L11, R11p, Uprime, Vprime)


def _signed_complete_qr(M):
    res = full_qr(M)
    return res.Q, res.R


def assertable_j_max(m, n, l, lp=None):
    """Largest residual index j the verifiers assert; larger j up to
    min(m, n) - k are still computed but tagged ':recorded'."""
    return min(m, n) - max(l, lp if lp is not None else l)


def _tagged(name, j, j_ok):
    return f"{name}:j={j}" if j <= j_ok else f"{name}:j={j}:recorded"


def verify_lu_bounds(A, U1, V1, k, j_list, tol=1e-8):
    """Check the residual and singular-value bounds of the two-sided LU
    approximation for the given sketches.

    Returns reports for: the Frobenius and spectral residual bounds, their
    rank-(j-1)-deflated versions for each j in ``j_list``, and the lower
    bound on the leading singular values of the approximation (one report
    per i <= k).
    """
    A = check_matrix(A)
    m, n = A.shape
    U1 = _dense_left(U1)
    V1 = _dense_right(V1)
    lp, l = U1.shape[0], V1.shape[1]
    ext = extend_square(U1, V1)
    F = fx.glu(A, U1, V1, k=k)
    Ak = F.reconstruct()
    Q, R = _signed_complete_qr(A @ ext.V)
    X = ext.U @ Q
    X11, X12 = X[:lp, :l], X[:lp, l:]
    R11, R22 = R[:l, :l], R[l:, l:]
    M = pinv(X11) @ X12
    resid = A - Ak
    sres = np.linalg.svd(resid, compute_uv=False)
    spec2 = np.linalg.svd(A, compute_uv=False)[0] ** 2
    fro2 = float(np.linalg.norm(A) ** 2)

    reports = []

    def ineq(name, lhs, rhs, proxy):
        reports.append(BoundReport(name, float(lhs), float(rhs), max(abs(lhs), abs(rhs), proxy), tol))

    ineq("lu_frob", np.linalg.norm(resid) ** 2,
         np.linalg.norm(R22) ** 2 + np.linalg.norm(M @ R22) ** 2, fro2)
    ineq("lu_spectral", sres[0] ** 2,
         np.linalg.norm(R22, 2) ** 2 + np.linalg.norm(M @ R22, 2) ** 2, spec2)
    j_ok = assertable_j_max(m, n, l, lp)
    for j in j_list:
        if not 1 <= j <= min(m, n) - k:
            raise ValueError(f"j={j} outside 1..{min(m, n) - k}")
        R22t = svd_tail(R22, j - 1)
        ineq(_tagged("lu_frob2", j, j_ok), float(np.sum(sres[j - 1:] ** 2)),
             np.linalg.norm(R22t) ** 2 + np.linalg.norm(M @ R22t) ** 2, fro2)
        ineq(_tagged("lu_spectral2", j, j_ok), sigma_at(sres, j) ** 2,
             np.linalg.norm(R22t, 2) ** 2 + np.linalg.norm(M @ R22t, 2) ** 2, spec2)
    sAk = np.linalg.svd(Ak, compute_uv=False)
    sRR = np.linalg.svd(R11 @ np.linalg.inv(ext.R11p), compute_uv=False)
    for i in range(1, k + 1):
        ineq(f"lu_sigma_low:i={i}", sigma_at(sRR, i), sigma_at(sAk, i), math.sqrt(spec2))
    return reports


def verify_qr_bounds(A, V1, k, j_list, tol=1e-8, eq_tol=1e-10):
    """Check the projection-residual facts for the column-sketch (QR) route.

    Reports, in order: the exact match between residual singular values and
    the trailing triangular block, the Frobenius and spectral residual
    bounds, the deflated bounds for each j in ``j_list`` built from the
    rotated right singular basis, and the three-way ordering of the leading
    singular values against the sketched-range projection.
    """
    A = check_matrix(A)
    m, n = A.shape
    V1 = _dense_right(V1)
    l = V1.shape[1]
    if not 1 <= k <= l:
        raise ValueError(f"need l >= k >= 1, got k={k}, l={l}")
    V, Vprime, R11p = _extend_right(V1)
    _, s, SvT = np.linalg.svd(A)
    Sv = SvT.T
    Q, R = _signed_complete_qr(A @ V)
    Q1 = Q[:, :l]
    R11, R22 = R[:l, :l], R[l:, l:]
    proj = Q1 @ (Q1.T @ A)
    resid = proj - A
    sres = np.linalg.svd(resid, compute_uv=False)
    sR22 = np.linalg.svd(R22, compute_uv=False)
    sproj = np.linalg.svd(proj, compute_uv=False)
    spec = s[0]
    reports = []

    def ineq(name, lhs, rhs, proxy):
        reports.append(BoundReport(name, float(lhs), float(rhs), max(abs(lhs), abs(rhs), proxy), tol))

    for j in range(1, min(m, n) - l + 1):
        rel = abs(sigma_at(sres, j) - sigma_at(sR22, j)) / max(spec, _EPS)
        reports.append(BoundReport(f"qr_sigma_match:j={j}", rel, eq_tol, 1.0, 0.0))

    SV = Sv.T @ V
    SV11, SV21 = SV[:k, :l], SV[k:, :l]
    _require_rank(SV11, k, f"leading {k} x {l} block of the rotated factor")
    Sig2 = _tail_diag(s, k, m, n, offset=0)
    G = Sig2 @ SV21 @ pinv(SV11)
    ineq("qr_frob", np.linalg.norm(resid) ** 2,
         np.linalg.norm(Sig2) ** 2 + np.linalg.norm(G) ** 2, float(np.sum(s ** 2)))
    ineq("qr_spectral", sres[0] ** 2, sigma_at(s, k + 1) ** 2 + np.linalg.norm(G, 2) ** 2, spec ** 2)

    j_ok = min(m, n) - l
    for j in j_list:
        if not 1 <= j <= min(m, n) - k:
            raise ValueError(f"j={j} outside 1..{min(m, n) - k}")
        St = np.hstack([Sv[:, j - 1:], Sv[:, : j - 1]])
        StV = St.T @ V
        Sj2 = _tail_diag(s, k, m, n, offset=j - 1)
        Gj = Sj2 @ StV[k:, :l] @ pinv(StV[:k, :l])
        ineq(_tagged("qr_spectral_tail", j, j_ok), sigma_at(sres, j) ** 2,
             sigma_at(s, k + j) ** 2 + np.linalg.norm(Gj, 2) ** 2, spec ** 2)
        ineq(_tagged("qr_frob_tail", j, j_ok), float(np.sum(sres[j - 1:] ** 2)),
             np.linalg.norm(Sj2) ** 2 + np.linalg.norm(Gj) ** 2, float(np.sum(s ** 2)))

    smin_front = np.linalg.svd((Sv.T @ Vprime)[:k, :l], compute_uv=False)[-1]
    sRR = np.linalg.svd(R11 @ np.linalg.inv(R11p), compute_uv=False)
    for j in range(1, k + 1):
        ineq(f"qr_sigma_upper:j={j}", sigma_at(sproj, j), sigma_at(s, j), spec)
        ineq(f"qr_sigma_mid:j={j}", sigma_at(sRR, j), sigma_at(sproj, j), spec)
        ineq(f"qr_sigma_low:j={j}", sigma_at(s, j) * smin_front, sigma_at(sRR, j), spec)
    return reports


def _tail_diag(s, k, m, n, offset):
    """(m-k) x (n-k) diagonal matrix of the singular values from k+offset on."""
    D = np.zeros((m - k, n - k))
    tail = s[k + offset:]
    r = min(tail.size, m - k, n - k)
    D[np.arange(r), np.arange(r)] = tail[:r]
    return D


def verify_schur_identities(A, U1, V1, tol=1e-10):
    """Residuals of the three block identities tying the doubly sketched
    matrix to the QR factorization of A V: the Schur-complement product
    form, the leading-block product form, and the elimination-panel ratio.
    Each report stores the relative residual as lhs and ``tol`` as rhs."""
    A = check_matrix(A)
    m, n = A.shape
    U1 = _dense_left(U1)
    V1 = _dense_right(V1)
    lp, l = U1.shape[0], V1.shape[1]
    ext = extend_square(U1, V1)
    Abar = ext.U @ A @ ext.V
    Q, R = _signed_complete_qr(A @ ext.V)
    X = ext.U @ Q
    R11, R22 = R[:l, :l], R[l:, l:]
    A11, A12, A21 = Abar[:lp, :l], Abar[:lp, l:], Abar[lp:, :l]
    X11, X12, X21, X22 = X[:lp, :l], X[:lp, l:], X[lp:, :l], X[lp:, l:]

    schur_a = Abar[lp:, l:] - A21 @ (pinv(A11) @ A12)
    schur_x = X22 - X21 @ (pinv(X11) @ X12)
    norm_a = np.linalg.norm(A) * np.linalg.norm(ext.U, 2) * np.linalg.norm(ext.V, 2)

    def rel(name, lhs_mat, rhs_mat, floor):
        num = np.linalg.norm(lhs_mat - rhs_mat)
        den = max(np.linalg.norm(lhs_mat), np.linalg.norm(rhs_mat), floor, _EPS)
        return BoundReport(name, float(num / den), tol, 1.0, 0.0)

    return [
        rel("schur_product_identity", schur_a, schur_x @ R22, _EPS * norm_a),
        rel("leading_block_identity", A11, X11 @ R11, _EPS * norm_a),
        rel("panel_ratio_identity", A21 @ pinv(A11), X21 @ pinv(X11), 1.0),
    ]


@dataclass(frozen=True)
class GammaMetrics:
    """Quality ratios of an approximation against the truncated SVD baseline.

    ``gamma_lowrank`` is the spectral residual over the (k+1)-th singular
    value; ``gamma_spectrum[j-1]`` is ``sigma_j(A) / sigma_j(Ak)`` for
    j <= k; ``gamma_kernel[j-1]`` is ``sigma_j(A - Ak) / sigma_{k+j}(A)``.
    All equal 1 for the optimal truncation.  When the trailing spectrum of A
    vanishes the ratios are undefined: ``exact_recovery`` is set and the
    affected entries are NaN.
    """

    gamma_lowrank: float
    gamma_spectrum: np.ndarray
    gamma_kernel: np.ndarray
    exact_recovery: bool


def gamma_metrics(A, Ak, k):
    A = check_matrix(A)
    Ak = check_matrix(Ak, name="Ak")
    if A.shape != Ak.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {Ak.shape}")
    m, n = A.shape
    if not 0 <= k <= min(m, n):
        raise ValueError(f"k={k} out of range")
    s = np.linalg.svd(A, compute_uv=False)
    sres = np.linalg.svd(A - Ak, compute_uv=False)
    sAk = np.linalg.svd(Ak, compute_uv=False)
    cutoff = max(m, n) * _EPS * (s[0] if s.size else 0.0)

    nker = min(m, n) - k
    kernel = np.full(nker, np.nan)
    for j in range(1, nker + 1):
        denom = sigma_at(s, k + j)
        if denom > cutoff:
            kernel[j - 1] = sigma_at(sres, j) / denom
    spectrum = np.full(k, np.nan)
    for j in range(1, k + 1):
        denom = sigma_at(sAk, j)
        if denom > 0:
            spectrum[j - 1] = sigma_at(s, j) / denom
        elif sigma_at(s, j) == 0:
            spectrum[j - 1] = 1.0
    exact = sigma_at(s, k + 1) <= cutoff
    low = kernel[0] if nker >= 1 else np.nan
    return GammaMetrics(float(low), spectrum, kernel, bool(exact))


def compare_cw_glu(A, U1, V1, k=None, tol=1e-8):
    """Compare the two-sided pseudo-inverse factorization against the
    Schur-deletion one on identical sketches.

    Returns three reports: the Frobenius decomposition of the extra error
    (an identity), the match between the gap and the lifted projection
    residual (an identity), and the spectral-norm inequality.  Sketches are
    materialized so both routes use exact pseudo-inverses.
    """
    A = check_matrix(A)
    U1 = _dense_left(U1)
    V1 = _dense_right(V1)
    Ak = fx.glu(A, U1, V1, k=k).reconstruct()
    Akp = fx.cw(A, U1, V1, k=k).reconstruct()
    At = U1 @ A
    AtV1 = At @ V1
    B = At - AtV1 @ (pinv(AtV1) @ At)
    U1pB = pinv(U1) @ B

    froA2 = float(np.linalg.norm(A) ** 2)
    f_cw = float(np.linalg.norm(A - Akp) ** 2)
    f_glu = float(np.linalg.norm(A - Ak) ** 2)
    f_gap = float(np.linalg.norm(Ak - Akp) ** 2)
    f_b = float(np.linalg.norm(U1pB) ** 2)
    s_cw = float(np.linalg.norm(A - Akp, 2) ** 2)
    s_glu = float(np.linalg.norm(A - Ak, 2) ** 2)
    s_b = float(np.linalg.norm(U1pB, 2) ** 2)
    spec2 = float(np.linalg.norm(A, 2) ** 2)
    return [
        BoundReport("cw_frob_pythagoras", abs(f_cw - f_glu - f_gap), tol * froA2, 1.0, 0.0),
        BoundReport("cw_gap_projection", abs(f_gap - f_b),
                    tol * max(f_gap, f_b, _EPS * froA2), 1.0, 0.0),
        BoundReport("cw_spectral", s_cw, s_glu + s_b, max(s_cw, s_glu + s_b, spec2), tol),
    ]
