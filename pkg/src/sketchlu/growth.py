"""Spectral growth factors of Gaussian elimination and the random
pre/post-conditioning experiment.

The growth of elimination is measured in the operator norm: the largest
ratio of a partially eliminated trailing block to the original matrix, and
the largest multiplier panel.  Orthogonal (or Gaussian) conditioning from
both sides keeps both quantities polynomial in n with high probability, and
this module provides the Monte-Carlo machinery to observe that, together
with a tail check on the smallest singular value of minors of random
orthogonal matrices.
"""

import math

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .sketch import make_sketch, rng_from_seed
from .validation import check_matrix


class TinyPivotError(np.linalg.LinAlgError):
    """Elimination hit a pivot too small to divide by."""

    def __init__(self, step, pivot):
        super().__init__(f"pivot {pivot:.3e} at elimination step {step} is below tolerance")
        self.step = step
        self.pivot = pivot


@dataclass(frozen=True)
class GrowthResult:
    """Per-step and overall growth of unpivoted elimination.

    ``per_step_u[p]`` is the spectral norm of the trailing block after
    eliminating p pivots over the spectral norm of the input (step 0 is the
    input itself, ratio 1); ``per_step_l[p]`` is the spectral norm of the
    accumulated multiplier panel (0 at step 0).  ``rho_u``/``rho_l`` are the
    maxima, and ``min_pivot`` the smallest pivot magnitude encountered.
    """

    rho_u: float
    rho_l: float
    per_step_u: np.ndarray
    per_step_l: np.ndarray
    min_pivot: float


def growth_factors(Abar, pivot_rtol=1e-12):
    """Run unpivoted elimination on a square matrix and record growth.

    Raises :class:`TinyPivotError` naming the step when a pivot falls below
    ``pivot_rtol`` times the spectral norm of the input.  The trailing block
    after p steps equals the Schur complement of the leading p x p block, and
    the multiplier panel equals that block's elimination coefficients, so the
    whole sweep costs one O(n^3) elimination plus an exact spectral norm per
    step (fine at desk scale).
    """
    Abar = check_matrix(Abar)
    n = Abar.shape[0]
    if n != Abar.shape[1]:
        raise ValueError(f"growth factors need a square matrix, got {Abar.shape}")
    norm0 = np.linalg.norm(Abar, 2)
    if norm0 == 0:
        raise ValueError("zero matrix has no elimination growth")
    W = Abar.copy()
    L = np.zeros((n, n))
    per_u = np.empty(n)
    per_l = np.empty(n)
    per_u[0] = 1.0
    per_l[0] = 0.0
    min_pivot = math.inf
    for p in range(n - 1):
        piv = W[p, p]
        min_pivot = min(min_pivot, abs(piv))
        if abs(piv) < pivot_rtol * norm0:
            raise TinyPivotError(p + 1, float(piv))
        L[p + 1:, p] = W[p + 1:, p] / piv
        W[p + 1:, p:] -= np.outer(L[p + 1:, p], W[p, p:])
        per_u[p + 1] = np.linalg.norm(W[p + 1:, p + 1:], 2) / norm0
        # the block ratio A21 inv(A11) equals L21 inv(L11) with L unit lower
        panel = scipy.linalg.solve_triangular(
            L[: p + 1, : p + 1].T, L[p + 1:, : p + 1].T, lower=False, unit_diagonal=True,
        ).T
        per_l[p + 1] = np.linalg.norm(panel, 2)
    return GrowthResult(
        rho_u=float(per_u.max()),
        rho_l=float(per_l.max()),
        per_step_u=per_u,
        per_step_l=per_l,
        min_pivot=float(min_pivot),
    )


@dataclass(frozen=True)
class ConditioningStats:
    """Per-trial conditioned-growth observations and their summary."""

    log_growth: np.ndarray
    mean: float
    median: float
    max: float
    failures: int
    trials: int
    ensemble: str


def precondition_experiment(A, trials, seed, ensemble="haar"):
    """Condition A from both sides by random square matrices and measure growth.

    Each trial draws fresh conditioners (``haar`` orthogonal or ``gaussian``)
    with a per-trial seed derived from ``(seed, trial)``, eliminates the
    conditioned matrix, and records ``log_n(max(rho_u, rho_l))``.  Trials
    that hit a tiny pivot count as failures instead of raising; their slot is
    dropped from the value array.
    """
    A = check_matrix(A)
    n = A.shape[0]
    if n != A.shape[1] or n < 4:
        raise ValueError("conditioning experiment needs a square matrix with n >= 4")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if ensemble not in ("haar", "gaussian"):
        raise ValueError(f"unknown ensemble {ensemble!r}")
    vals = []
    failures = 0
    for t in range(trials):
        left = make_sketch(ensemble, n, n, seed=(seed, 2 * t))
        right = make_sketch(ensemble, n, n, seed=(seed, 2 * t + 1))
        Abar = left.to_dense() @ A @ right.to_dense().T
        try:
            g = growth_factors(Abar)
        except TinyPivotError:
            failures += 1
            continue
        vals.append(math.log(max(g.rho_u, g.rho_l)) / math.log(n))
    vals = np.asarray(vals)
    ok = vals.size > 0
    return ConditioningStats(
        log_growth=vals,
        mean=float(vals.mean()) if ok else math.nan,
        median=float(np.median(vals)) if ok else math.nan,
        max=float(vals.max()) if ok else math.nan,
        failures=failures,
        trials=trials,
        ensemble=ensemble,
    )


@dataclass(frozen=True)
class MinorTailCurve:
    """Empirical tail of the scaled smallest singular value of a random
    orthogonal minor, against the linear reference bound."""

    n: int
    k: int
    trials: int
    deltas: np.ndarray
    empirical: np.ndarray
    bound: np.ndarray
    stderr: np.ndarray

    def within_bound(self, num_se=3.0):
        return np.all(self.empirical <= self.bound + num_se * self.stderr)


def haar_minor_tail(n, k, trials, seed, deltas=(0.1, 0.25, 0.5, 1.0)):
    """Sample leading k x k minors of Haar orthogonal n x n matrices and
    compare P[sigma_min * sqrt(k(n-k)) <= delta] with the reference tail
    2.02 * delta on a delta grid.

    The reference holds for k and n-k above 30, so smaller blocks are
    rejected.  ``stderr`` is the binomial standard error at the reference
    probability (capped at 1), letting callers assert with a margin of a few
    standard errors.
    """
    if k <= 30 or n - k <= 30:
        raise ValueError(f"tail reference needs k > 30 and n - k > 30, got k={k}, n={n}")
    if trials < 100:
        raise ValueError("need at least 100 trials")
    rng = rng_from_seed(seed)
    scaled = np.empty(trials)
    scalef = math.sqrt(k * (n - k))
    for t in range(trials):
        G = rng.standard_normal((n, n))
        Q, R = np.linalg.qr(G)
        d = np.sign(np.diag(R))
        d[d == 0] = 1.0
        Q = Q * d
        smin = np.linalg.svd(Q[:k, :k], compute_uv=False)[-1]
        scaled[t] = smin * scalef
    deltas = np.asarray(deltas, dtype=np.float64)
    empirical = np.array([(scaled <= d).mean() for d in deltas])
    bound = 2.02 * deltas
    p = np.minimum(bound, 1.0)
    stderr = np.sqrt(p * (1.0 - p) / trials)
    return MinorTailCurve(n, k, trials, deltas, empirical, bound, stderr)
