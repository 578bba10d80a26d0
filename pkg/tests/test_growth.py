import numpy as np
import pytest

from numpy.testing import assert_allclose

from sketchlu import (
    TinyPivotError,
    growth_factors,
    haar_minor_tail,
    make_sketch,
    precondition_experiment,
)


def test_identity_growth():
    g = growth_factors(np.eye(6))
    assert g.rho_u == 1.0
    assert g.rho_l == 0.0
    assert g.min_pivot == 1.0


def test_single_elimination_step():
    c = -3.5
    g = growth_factors(np.array([[1.0, 0.0], [c, 1.0]]))
    assert abs(g.rho_l - abs(c)) <= 1e-12
    assert abs(g.rho_u - 1.0) <= 1e-12


def test_per_step_matches_bruteforce_schur():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((8, 8)) + 8 * np.eye(8)  # well conditioned pivots
    g = growth_factors(A)
    nrm = np.linalg.norm(A, 2)
    for p in range(1, 8):
        S = A[p:, p:] - A[p:, :p] @ np.linalg.solve(A[:p, :p], A[:p, p:])
        L21 = np.linalg.solve(A[:p, :p].T, A[p:, :p].T).T
        assert abs(g.per_step_u[p] - np.linalg.norm(S, 2) / nrm) <= 1e-10
        assert abs(g.per_step_l[p] - np.linalg.norm(L21, 2)) <= 1e-10
    assert g.rho_u == g.per_step_u.max()
    assert g.rho_l == g.per_step_l.max()


def test_schur_recursion_consistency():
    # the trailing block after p+1 steps is the Schur complement of the
    # (1,1) entry of the trailing block after p steps
    rng = np.random.default_rng(1)
    A = rng.standard_normal((7, 7)) + 7 * np.eye(7)
    def schur_p(p):
        return A[p:, p:] - A[p:, :p] @ np.linalg.solve(A[:p, :p], A[:p, p:])
    for p in range(1, 6):
        Sp = schur_p(p)
        inner = Sp[1:, 1:] - np.outer(Sp[1:, 0], Sp[0, 1:]) / Sp[0, 0]
        assert np.linalg.norm(inner - schur_p(p + 1)) <= 1e-10 * np.linalg.norm(A)


def test_growth_scale_invariance():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((6, 6)) + 6 * np.eye(6)
    g1 = growth_factors(A)
    g2 = growth_factors(17.0 * A)
    assert abs(g1.rho_u - g2.rho_u) <= 1e-10
    assert abs(g1.rho_l - g2.rho_l) <= 1e-10


def test_tiny_pivot_error_carries_step_and_value():
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(TinyPivotError) as exc:
        growth_factors(A)
    assert exc.value.step == 1
    assert exc.value.pivot == 0.0


def test_growth_rejects_nonsquare():
    with pytest.raises(ValueError):
        growth_factors(np.ones((3, 4)))


def test_orthogonal_growth_consistency_recorded():
    # for an orthogonal input, record how rho_u compares against 1 + rho_l
    # (an observed regularity, not a theorem; nothing asserted about it)
    Q = make_sketch("haar", 12, 12, seed=3).to_dense()
    g = growth_factors(Q)
    print(f"orthogonal input: rho_u={g.rho_u:.3f} vs 1 + rho_l={1 + g.rho_l:.3f}")
    assert np.isfinite(g.rho_u) and np.isfinite(g.rho_l)


def test_precondition_identity_runs_and_reports():
    stats = precondition_experiment(np.eye(16), trials=5, seed=0)
    assert stats.trials == 5
    assert stats.failures + stats.log_growth.size == 5
    assert np.all(np.isfinite(stats.log_growth))


def test_precondition_deterministic():
    A = np.eye(12)
    s1 = precondition_experiment(A, trials=1, seed=42)
    s2 = precondition_experiment(A, trials=1, seed=42)
    assert np.array_equal(s1.log_growth, s2.log_growth)
    s3 = precondition_experiment(A, trials=1, seed=43)
    assert not np.array_equal(s1.log_growth, s3.log_growth)


def test_precondition_gaussian_ensemble():
    stats = precondition_experiment(np.eye(12), trials=3, seed=1, ensemble="gaussian")
    assert stats.ensemble == "gaussian"
    assert stats.log_growth.size + stats.failures == 3


def test_gaussian_and_orthogonal_conditioning_are_comparable():
    # the two ensembles differ only by triangular factors, so the observed
    # growth statistics should sit in the same range
    h = precondition_experiment(np.eye(24), trials=15, seed=0, ensemble="haar")
    g = precondition_experiment(np.eye(24), trials=15, seed=0, ensemble="gaussian")
    assert h.failures == 0 and g.failures == 0
    assert 0.5 <= g.median / h.median <= 2.0


def test_precondition_validates_input():
    with pytest.raises(ValueError):
        precondition_experiment(np.eye(3), trials=2, seed=0)
    with pytest.raises(ValueError):
        precondition_experiment(np.eye(8), trials=0, seed=0)
    with pytest.raises(ValueError):
        precondition_experiment(np.eye(8), trials=2, seed=0, ensemble="rademacher")


def test_minor_tail_zero_delta_has_zero_mass():
    curve = haar_minor_tail(70, 35, trials=100, seed=0, deltas=(0.0, 0.5))
    assert curve.empirical[0] == 0.0


def test_minor_tail_within_reference_bound():
    for seed in (0, 1):
        curve = haar_minor_tail(70, 35, trials=150, seed=seed, deltas=(0.25, 0.5, 1.0))
        assert curve.within_bound()


def test_minor_tail_hypothesis_guard():
    with pytest.raises(ValueError):
        haar_minor_tail(50, 20, trials=100, seed=0)
    with pytest.raises(ValueError):
        haar_minor_tail(60, 35, trials=100, seed=0)  # n - k too small
    with pytest.raises(ValueError):
        haar_minor_tail(80, 40, trials=50, seed=0)
