"""Scikit-learn compatible front end for the sketched factorizations.

The estimator treats the fitted matrix X (n_samples x n_features) as the
object being approximated, in the same spirit as matrix-factorization
transformers: after ``fit``, ``components_`` holds the short-wide row factor
and ``fit_transform`` returns the tall-skinny left factor W so that
``W @ components_`` reconstructs the approximation.  ``transform`` maps new
rows into the factor space by least squares against ``components_``.
"""

import numpy as np

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .factor import factorize
from .generate import resolve_dims
from .linalg import pinv
from .sketch import GAUSSIAN, HAAR, SRHT, make_sketch

_SKETCH_KINDS = (SRHT, GAUSSIAN, HAAR)


class SketchedLowRank(BaseEstimator, TransformerMixin):
    """Low-rank approximation of a data matrix via two-sided sketching.

    Parameters
    ----------
    rank : int
        Target rank k the approximation competes against.
    algo : {"glu", "rlu", "rqr", "prr_rlu", "cw"}
        Factorization route.  "glu" and "cw" use both sketches; "rqr" and
        "prr_rlu" only sketch columns.
    l, lp : int or None
        Inner/outer oversampling.  Resolved from ``rank`` when omitted
        (accuracy formula, falling back to 4k/8k at desk scale).
    sketch : {"srht", "gaussian", "haar"}
        Random ensemble for the sketches.
    random_state : int or None
        Seed for the sketch draws; None draws fresh entropy.

    Attributes
    ----------
    components_ : ndarray of shape (r, n_features)
        Row factor S of the approximation.
    factorization_ : GluFactorization
        The full factorization object (T, S and any middle block).
    """

    def __init__(self, rank=2, algo="glu", l=None, lp=None, sketch="srht", random_state=None):
        self.rank = rank
        self.algo = algo
        self.l = l
        self.lp = lp
        self.sketch = sketch
        self.random_state = random_state

    def _seeds(self):
        ss = np.random.SeedSequence(self.random_state)
        return [int(s) for s in ss.generate_state(2, dtype=np.uint64)]

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        m, n = X.shape
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.sketch not in _SKETCH_KINDS:
            raise ValueError(f"sketch must be one of {_SKETCH_KINDS}")
        l, lp, _ = resolve_dims(self.rank, m, n, l=self.l, lp=self.lp)
        if self.algo in ("rlu", "rqr", "prr_rlu"):
            lp = l
        seed_u, seed_v = self._seeds()
        U1 = make_sketch(self.sketch, m, lp, seed_u)
        V1 = make_sketch(self.sketch, n, l, seed_v)
        F = factorize(X, self.algo, U1=U1, V1=V1, k=self.rank)
        W = F.T @ F._mid_solve(np.eye(F.S.shape[0]))
        self.factorization_ = F
        self.components_ = F.S
        self._left_factor = W
        self.n_features_in_ = n
        self.l_, self.lp_ = l, lp
        return self

    def fit_transform(self, X, y=None):
        """Fit and return the exact left factor of the approximation."""
        self.fit(X, y)
        return self._left_factor.copy()

    def transform(self, X):
        """Least-squares coefficients of X's rows against ``components_``."""
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ pinv(self.components_)

    def inverse_transform(self, W):
        check_is_fitted(self, "components_")
        W = check_array(W, dtype=np.float64)
        return W @ self.components_

    def reconstruct(self):
        """Densify the fitted approximation."""
        check_is_fitted(self, "factorization_")
        return self.factorization_.reconstruct()
