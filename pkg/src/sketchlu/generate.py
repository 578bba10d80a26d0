"""Test-matrix generators with controlled singular spectra."""

from dataclasses import dataclass

import numpy as np

from .sketch import make_sketch, sketch_dims


@dataclass(frozen=True)
class SpectrumProfile:
    """A prescribed singular-value profile for an m x n matrix.

    Kinds and their parameters:

    * ``exp``           -- args (rate,): sigma_j = exp(-rate * (j - 1))
    * ``poly``          -- args (power,): sigma_j = j ** -power
    * ``step``          -- args (k, gap): 1 for j <= k, then 1/gap
    * ``noisy_lowrank`` -- args (k, noise_level): 1 for j <= k, then the
                           noise level as a flat floor
    """

    kind: str
    args: tuple
    m: int
    n: int
    seed: int = 0

    def sigma(self):
        r = min(self.m, self.n)
        j = np.arange(1, r + 1, dtype=np.float64)
        if self.kind == "exp":
            (rate,) = self.args
            return np.exp(-rate * (j - 1))
        if self.kind == "poly":
            (power,) = self.args
            return j ** -float(power)
        if self.kind == "step":
            k, gap = self.args
            return np.where(j <= k, 1.0, 1.0 / gap)
        if self.kind == "noisy_lowrank":
            k, noise = self.args
            return np.where(j <= k, 1.0, float(noise))
        raise ValueError(f"unknown profile kind {self.kind!r}")


def parse_profile(text, m, n, seed=0):
    """Parse ``kind:arg1:arg2`` strings, e.g. ``step:3:100`` or ``exp:0.5``."""
    parts = text.split(":")
    kind, args = parts[0], tuple(float(a) for a in parts[1:])
    expected = {"exp": 1, "poly": 1, "step": 2, "noisy_lowrank": 2}
    if kind not in expected:
        raise ValueError(f"unknown profile kind {kind!r}")
    if len(args) != expected[kind]:
        raise ValueError(f"profile {kind!r} takes {expected[kind]} parameter(s), got {len(args)}")
    return SpectrumProfile(kind, args, m, n, seed)


def gen_from_sigma(sigma, m, n, seed):
    """Compose random orthonormal factors around prescribed singular values."""
    sigma = np.asarray(sigma, dtype=np.float64)
    r = sigma.shape[0]
    if r > min(m, n):
        raise ValueError(f"{r} singular values do not fit a {m} x {n} matrix")
    if np.any(sigma < 0) or np.any(np.diff(sigma) > 0):
        raise ValueError("sigma must be nonnegative and descending")
    U = make_sketch("haar", m, r, seed=(seed, 0)).to_dense().T
    V = make_sketch("haar", n, r, seed=(seed, 1)).to_dense().T
    return (U * sigma) @ V.T


def gen_matrix(profile):
    """Materialize a profile; the output's singular values match it."""
    return gen_from_sigma(profile.sigma(), profile.m, profile.n, profile.seed)


def resolve_dims(k, m, n, eps=0.1, delta=0.1, l=None, lp=None):
    """Resolve oversampling sizes for a run.

    Explicit l/lp win.  Otherwise the accuracy-driven formula is evaluated;
    when it exceeds the matrix (the usual case at desk scale) the fallback is
    l = min(4k, n, m) and lp = min(8k, m).  Returns (l, lp, used_fallback).
    """
    if l is not None or lp is not None:
        l = int(l) if l is not None else min(4 * k, n, m)
        lp = int(lp) if lp is not None else max(l, min(8 * k, m))
        if not k <= l <= lp:
            raise ValueError(f"need k <= l <= lp, got k={k}, l={l}, lp={lp}")
        return l, lp, False
    dims = sketch_dims(k, eps, delta, n, m)
    if not dims.clamped:
        return dims.l, dims.lp, False
    l = max(k, min(4 * k, n, m))
    lp = max(l, min(8 * k, m))
    return l, lp, True
