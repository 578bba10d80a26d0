"""Random sketching ensembles with seeded, bit-reproducible construction.

Supported kinds
---------------
``srht``
    Subsampled randomized Hadamard transform ``sqrt(n'/s) P H D``: random
    signs D, orthonormal Walsh-Hadamard transform H, and a subsample P of s
    distinct rows drawn without replacement.  Inputs whose dimension is not a
    power of two are zero-padded to the next power n', and the scale uses n'.
    Application never materializes H; it runs the fast transform instead.
``gaussian``
    Dense matrix of i.i.d. unit-variance normal entries.
``haar``
    Orthonormal rows, distributed uniformly over the Stiefel manifold
    (Q factor of a seeded Gaussian with the nonnegative-diagonal sign fix).
``row_selection``
    Selection of ``out_dim`` distinct row indices.
``explicit``
    Any caller-supplied dense matrix.

Randomness comes from numpy's counter-based 64-bit Philox generator, so the
same (kind, dims, seed) always rebuilds the identical operator, and normal
variates use numpy's ziggurat method.  Operators are immutable after
construction and safe to share across threads.
"""

import math

from dataclasses import dataclass, field

import numpy as np

from .validation import check_matrix

SRHT = "srht"
GAUSSIAN = "gaussian"
HAAR = "haar"
ROW_SELECTION = "row_selection"
EXPLICIT = "explicit"

_KINDS = (SRHT, GAUSSIAN, HAAR, ROW_SELECTION, EXPLICIT)
_SUBSAMPLING = (SRHT, ROW_SELECTION)


def rng_from_seed(seed):
    """The package-wide generator: counter-based 64-bit Philox."""
    return np.random.Generator(np.random.Philox(seed))


def next_pow2(n):
    return 1 << (int(n) - 1).bit_length()


def fwht(x):
    """Orthonormal Walsh-Hadamard transform along axis 0.

    Accepts a vector of length 2**p or a matrix with 2**p rows (each column
    transformed).  Runs the in-place butterfly and scales by 2**(-p/2), so
    the transform is an isometric involution.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if n == 0 or n & (n - 1):
        raise ValueError(f"fwht needs a power-of-two length, got {n}")
    shape = x.shape
    out = x.reshape(n, -1).copy()
    h = 1
    while h < n:
        out = out.reshape(n // (2 * h), 2, h, -1)
        a = out[:, 0].copy()
        b = out[:, 1].copy()
        out[:, 0] = a + b
        out[:, 1] = a - b
        out = out.reshape(n, -1)
        h *= 2
    out /= math.sqrt(n)
    return out.reshape(shape)


@dataclass(frozen=True, eq=False)
class SketchOperator:
    """A seeded left/right sketch of shape out_dim x in_dim, applied lazily.

    ``apply_left(A)`` computes ``S @ A`` for A with in_dim rows;
    ``apply_right(A)`` computes ``A @ S.T`` for A with in_dim columns (for a
    right factor V1 of shape n x l, the operator stores V1.T).
    """

    kind: str
    in_dim: int
    out_dim: int
    seed: int | None = None
    signs: np.ndarray | None = field(default=None, repr=False)
    rows: np.ndarray | None = field(default=None, repr=False)
    matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def padded_dim(self):
        return next_pow2(self.in_dim) if self.kind == SRHT else self.in_dim

    @property
    def scale(self):
        if self.kind != SRHT:
            raise AttributeError("scale is defined for srht operators only")
        return math.sqrt(self.padded_dim / self.out_dim)

    def apply_left(self, A):
        A = np.asarray(A, dtype=np.float64)
        squeeze = A.ndim == 1
        if squeeze:
            A = A[:, None]
        if A.shape[0] != self.in_dim:
            raise ValueError(f"operator acts on dimension {self.in_dim}, got {A.shape[0]} rows")
        if self.kind == SRHT:
            buf = np.zeros((self.padded_dim, A.shape[1]))
            buf[: self.in_dim] = self.signs[: self.in_dim, None] * A
            out = self.scale * fwht(buf)[self.rows]
        elif self.kind == ROW_SELECTION:
            out = A[self.rows].copy()
        else:
            out = self.matrix @ A
        return out[:, 0] if squeeze else out

    def apply_right(self, A):
        A = np.asarray(A, dtype=np.float64)
        if A.ndim != 2 or A.shape[1] != self.in_dim:
            raise ValueError(f"operator acts on dimension {self.in_dim}, got shape {A.shape}")
        return self.apply_left(A.T).T

    def apply_pinv(self, B):
        """Apply the operator's pseudo-inverse to B (out_dim rows).

        For srht the adjoint is structural: the rows of ``P H D`` are
        orthogonal, so ``pinv = sqrt(s/n') (P H D)^T`` followed by dropping
        the padding rows; that equals running the operator on the zero-padded
        domain.  Other kinds fall back to a dense pseudo-inverse.
        """
        B = np.asarray(B, dtype=np.float64)
        squeeze = B.ndim == 1
        if squeeze:
            B = B[:, None]
        if B.shape[0] != self.out_dim:
            raise ValueError(f"pinv acts on dimension {self.out_dim}, got {B.shape[0]} rows")
        if self.kind == SRHT:
            buf = np.zeros((self.padded_dim, B.shape[1]))
            buf[self.rows] = B
            out = (fwht(buf) * self.signs[:, None])[: self.in_dim] / self.scale
        elif self.kind == ROW_SELECTION:
            out = np.zeros((self.in_dim, B.shape[1]))
            out[self.rows] = B
        else:
            out = np.linalg.pinv(self.matrix) @ B
        return out[:, 0] if squeeze else out

    def to_dense(self):
        """Materialize the out_dim x in_dim matrix (desk-scale sizes only)."""
        if self.kind in (GAUSSIAN, HAAR, EXPLICIT):
            return self.matrix.copy()
        return self.apply_left(np.eye(self.in_dim))


def make_sketch(kind, in_dim, out_dim, seed):
    """Build a reproducible sketch operator of the given kind."""
    if kind not in _KINDS:
        raise ValueError(f"unknown sketch kind {kind!r}; expected one of {_KINDS}")
    if kind == EXPLICIT:
        raise ValueError("use explicit_sketch(matrix) for explicit operators")
    in_dim, out_dim = int(in_dim), int(out_dim)
    if in_dim < 1 or out_dim < 1:
        raise ValueError("dimensions must be positive")
    if kind in _SUBSAMPLING and out_dim > in_dim:
        raise ValueError(f"{kind} needs out_dim <= in_dim, got {out_dim} > {in_dim}")
    rng = rng_from_seed(seed)
    if kind == SRHT:
        npad = next_pow2(in_dim)
        signs = rng.choice(np.array([-1.0, 1.0]), size=npad)
        rows = rng.permutation(npad)[:out_dim]
        return SketchOperator(SRHT, in_dim, out_dim, seed, signs=signs, rows=rows)
    if kind == ROW_SELECTION:
        rows = rng.permutation(in_dim)[:out_dim]
        return SketchOperator(ROW_SELECTION, in_dim, out_dim, seed, rows=rows)
    if kind == GAUSSIAN:
        mat = rng.standard_normal((out_dim, in_dim))
        return SketchOperator(GAUSSIAN, in_dim, out_dim, seed, matrix=mat)
    # haar: orthonormal rows, uniform over the Stiefel manifold
    G = rng.standard_normal((in_dim, out_dim))
    Q, R = np.linalg.qr(G, mode="reduced")
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return SketchOperator(HAAR, in_dim, out_dim, seed, matrix=(Q * d).T)


def row_selection_sketch(indices, in_dim):
    """Selection operator for explicit row indices."""
    idx = np.asarray(indices, dtype=np.intp)
    if idx.ndim != 1 or idx.size == 0:
        raise ValueError("indices must be a nonempty 1-d sequence")
    if idx.min() < 0 or idx.max() >= in_dim:
        raise ValueError("indices out of range")
    if np.unique(idx).size != idx.size:
        raise ValueError("indices must be distinct")
    return SketchOperator(ROW_SELECTION, int(in_dim), idx.size, None, rows=idx)


def explicit_sketch(matrix):
    """Wrap a dense out_dim x in_dim matrix as an operator."""
    M = check_matrix(matrix, name="matrix")
    return SketchOperator(EXPLICIT, M.shape[1], M.shape[0], None, matrix=M)


@dataclass(frozen=True)
class SketchDims:
    """Resolved oversampling parameters for a (k, eps, delta) target."""

    k: int
    eps: float
    delta: float
    l: int
    lp: int
    clamped: bool = False

    def __post_init__(self):
        if not 1 <= self.k <= self.l <= self.lp:
            raise ValueError(f"need k <= l <= lp, got k={self.k}, l={self.l}, lp={self.lp}")


def sketch_dims(k, eps, delta, n, m):
    """Oversampling sizes ``l`` (inner) and ``lp`` (outer) for an m x n target.

    Evaluates, with natural logarithms,

        l  >= 10/eps * (sqrt(k) + sqrt(8 log(n/delta)))^2 * log(k/delta)
        lp >= 10/eps * (sqrt(l) + sqrt(8 log(m/delta)))^2 * log(k/delta)

    and takes ceilings.  The constants overwhelm desk-scale dimensions, so l
    is clamped to min(m, n) and lp to m, with ``clamped`` flagging that the
    formula exceeded the matrix.  The guarantees behind the formula assume
    eps below roughly 1/6; larger values up to 1 are accepted for
    experimentation.
    """
    k = int(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    logk = math.log(k / delta)
    l_raw = math.ceil(10.0 / eps * (math.sqrt(k) + math.sqrt(8.0 * math.log(n / delta))) ** 2 * logk)
    l = max(k, min(l_raw, min(m, n)))
    lp_raw = math.ceil(10.0 / eps * (math.sqrt(l) + math.sqrt(8.0 * math.log(m / delta))) ** 2 * logk)
    lp = max(l, min(lp_raw, m))
    return SketchDims(k, float(eps), float(delta), l, lp, clamped=(l_raw > l or lp_raw > lp))


def ose_check(S, Q):
    """Extreme singular values of S @ Q for an orthonormal-column Q.

    The harness uses the returned (sigma_min, sigma_max) pair to measure how
    far the sketch is from a subspace isometry.
    """
    Q = check_matrix(Q, name="Q")
    gram_err = np.abs(Q.T @ Q - np.eye(Q.shape[1])).max()
    if gram_err > 1e-8:
        raise ValueError(f"Q does not have orthonormal columns (|Q'Q - I|_max = {gram_err:.2e})")
    sv = np.linalg.svd(S.apply_left(Q), compute_uv=False)
    return float(sv[-1]), float(sv[0])
