import numpy as np
import pytest

from numpy.testing import assert_allclose

from sketchlu import (
    RankDeficiencyError,
    cw,
    factorize,
    glu,
    make_sketch,
    prr_rlu,
    rlu,
    row_select,
    row_selection_sketch,
    rqr,
    thin_qr,
)


def _selector_cols(n, l):
    return np.eye(n)[:, :l]


def _selector_rows(lp, m):
    return np.eye(m)[:lp]


def test_glu_identity_block_case():
    F = glu(np.eye(4), _selector_rows(2, 4), _selector_cols(4, 2))
    assert_allclose(F.reconstruct(), np.diag([1.0, 1.0, 0.0, 0.0]), atol=1e-14)


def test_glu_exact_on_rank_k():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((10, 3)) @ rng.standard_normal((3, 8))
    U1 = rng.standard_normal((3, 10))
    V1 = rng.standard_normal((8, 3))
    F = glu(A, U1, V1, k=3)
    assert np.linalg.norm(A - F.reconstruct()) <= 1e-9 * np.linalg.norm(A)


def test_glu_matches_dense_formula():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((16, 12))
    U1 = rng.standard_normal((6, 16))
    V1 = rng.standard_normal((12, 4))
    F = glu(A, U1, V1)
    Ah = U1 @ A @ V1
    Ahp = np.linalg.pinv(Ah)
    T = np.linalg.pinv(U1) @ (np.eye(6) - Ah @ Ahp) + (A @ V1) @ Ahp
    expected = T @ (U1 @ A)
    assert np.linalg.norm(F.reconstruct() - expected) <= 1e-10 * np.linalg.norm(A)


def test_glu_srht_structural_pinv_matches_dense_path():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((16, 12))  # power-of-two rows: adjoint path is exact
    U1 = make_sketch("srht", 16, 6, seed=5)
    V1 = rng.standard_normal((12, 4))
    F = glu(A, U1, V1)
    F_dense = glu(A, U1.to_dense(), V1)
    assert np.linalg.norm(F.reconstruct() - F_dense.reconstruct()) <= 1e-10 * np.linalg.norm(A)


def test_glu_padded_srht_factors_the_padded_matrix():
    # with padded rows the structural adjoint factors the zero-padded matrix
    from sketchlu import fwht

    rng = np.random.default_rng(3)
    A = rng.standard_normal((12, 10))  # rows pad to 16
    U1 = make_sketch("srht", 12, 5, seed=4)
    V1 = rng.standard_normal((10, 3))
    F = glu(A, U1, V1)
    Apad = np.vstack([A, np.zeros((4, 10))])
    dense_padded = U1.scale * fwht(np.eye(16))[U1.rows] * U1.signs[None, :]
    Fpad = glu(Apad, dense_padded, V1)
    assert np.linalg.norm(F.reconstruct() - Fpad.reconstruct()[:12]) <= 1e-10 * np.linalg.norm(A)


def test_glu_rank_deficient_core_raises():
    rng = np.random.default_rng(4)
    A = np.outer(rng.standard_normal(8), rng.standard_normal(6))  # rank 1
    with pytest.raises(RankDeficiencyError) as exc:
        glu(A, rng.standard_normal((3, 8)), rng.standard_normal((6, 2)))
    assert exc.value.sigma_min is not None


def test_glu_oversampling_validation():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((8, 6))
    with pytest.raises(ValueError):
        glu(A, rng.standard_normal((2, 8)), rng.standard_normal((6, 3)))  # lp < l
    with pytest.raises(ValueError):
        glu(A, rng.standard_normal((4, 8)), rng.standard_normal((6, 3)), k=4)  # k > l


def test_glu_dimension_mismatch():
    rng = np.random.default_rng(6)
    A = rng.standard_normal((8, 6))
    with pytest.raises(ValueError):
        glu(A, rng.standard_normal((3, 7)), rng.standard_normal((6, 2)))
    with pytest.raises(ValueError):
        glu(A, rng.standard_normal((3, 8)), rng.standard_normal((5, 2)))


def test_rlu_identity_selectors():
    F = rlu(np.eye(4), _selector_rows(2, 4), _selector_cols(4, 2))
    assert_allclose(F.reconstruct(), np.diag([1.0, 1.0, 0.0, 0.0]), atol=1e-14)
    assert F.mid is not None and F.mid.shape == (2, 2)


def test_rlu_full_dimension_recovers_matrix():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((5, 5))
    F = rlu(A, rng.standard_normal((5, 5)), rng.standard_normal((5, 5)))
    assert np.linalg.norm(F.reconstruct() - A) <= 1e-10 * np.linalg.norm(A)


def test_rlu_is_square_special_case_of_glu():
    rng = np.random.default_rng(8)
    A = rng.standard_normal((10, 8))
    U1 = rng.standard_normal((3, 10))
    V1 = rng.standard_normal((8, 3))
    d = np.linalg.norm(rlu(A, U1, V1).reconstruct() - glu(A, U1, V1).reconstruct())
    assert d <= 1e-10 * np.linalg.norm(A)


def test_rlu_requires_square_core():
    rng = np.random.default_rng(9)
    with pytest.raises(ValueError):
        rlu(rng.standard_normal((8, 6)), rng.standard_normal((4, 8)), rng.standard_normal((6, 3)))


def test_rqr_orthonormal_input_reproduced():
    Q = thin_qr(np.random.default_rng(10).standard_normal((8, 3))).Q
    F = rqr(Q, np.eye(3))
    assert np.linalg.norm(F.reconstruct() - Q) <= 1e-12


def test_rqr_single_direction():
    F = rqr(np.diag([3.0, 2.0, 1.0]), np.eye(3)[:, :1])
    assert_allclose(F.reconstruct(), np.diag([3.0, 0.0, 0.0]), atol=1e-14)


def test_rqr_equals_rlu_with_projected_rows():
    rng = np.random.default_rng(11)
    A = rng.standard_normal((12, 10))
    V1 = rng.standard_normal((10, 4))
    F = rqr(A, V1)
    G = rlu(A, F.T.T, V1)  # left sketch is the transposed orthonormal factor
    assert np.linalg.norm(F.reconstruct() - G.reconstruct()) <= 1e-10 * np.linalg.norm(A)


def test_rqr_rank_deficient_panel_raises():
    rng = np.random.default_rng(12)
    A = np.outer(rng.standard_normal(8), rng.standard_normal(6))
    with pytest.raises(RankDeficiencyError):
        rqr(A, rng.standard_normal((6, 2)))


def test_row_select_identity_on_top():
    Q = np.vstack([np.eye(3), np.zeros((4, 3))])
    assert sorted(row_select(Q)) == [0, 1, 2]


def test_row_select_identity_on_bottom():
    Q = np.vstack([np.zeros((4, 3)), np.eye(3)])
    assert sorted(row_select(Q)) == [4, 5, 6]


def test_row_select_bound_holds_post_hoc():
    Q = thin_qr(np.random.default_rng(13).standard_normal((30, 4))).Q
    sel = row_select(Q)
    assert sel.shape == (4,)
    rest = np.setdiff1d(np.arange(30), sel)
    C = Q[rest] @ np.linalg.inv(Q[sel])
    assert np.abs(C).max() <= 2.0 + 1e-12


def test_row_select_rejects_rank_deficient():
    with pytest.raises(RankDeficiencyError):
        row_select(np.zeros((6, 2)))


def test_prr_rlu_reproduces_selected_coordinates():
    P = np.eye(4)[[2, 0, 3, 1]]
    F = prr_rlu(P, _selector_cols(4, 2))
    R = F.reconstruct()
    sel = F.sketches[0].rows
    assert_allclose(R[sel], P[sel], atol=1e-12)


def test_prr_rlu_equals_rlu_with_selection():
    rng = np.random.default_rng(14)
    A = rng.standard_normal((20, 16))
    V1 = rng.standard_normal((16, 5))
    F = prr_rlu(A, V1)
    P1 = row_selection_sketch(F.sketches[0].rows, 20)
    G = rlu(A, P1, V1)
    assert np.linalg.norm(F.reconstruct() - G.reconstruct()) <= 1e-10 * np.linalg.norm(A)


def test_cw_identity_selectors():
    F = cw(np.eye(4), _selector_rows(2, 4), _selector_cols(4, 2))
    assert_allclose(F.reconstruct(), np.diag([1.0, 1.0, 0.0, 0.0]), atol=1e-14)


def test_cw_equals_rlu_for_square_invertible_core():
    rng = np.random.default_rng(15)
    A = rng.standard_normal((10, 8))
    U1 = rng.standard_normal((3, 10))
    V1 = rng.standard_normal((8, 3))
    d = np.linalg.norm(cw(A, U1, V1).reconstruct() - rlu(A, U1, V1).reconstruct())
    assert d <= 1e-10 * np.linalg.norm(A)


def test_cw_never_beats_glu_in_frobenius():
    rng = np.random.default_rng(16)
    A = rng.standard_normal((16, 12))
    U1 = rng.standard_normal((6, 16))
    V1 = rng.standard_normal((12, 3))
    r_cw = np.linalg.norm(A - cw(A, U1, V1).reconstruct())
    r_glu = np.linalg.norm(A - glu(A, U1, V1).reconstruct())
    assert r_cw >= r_glu - 1e-10 * np.linalg.norm(A)


def test_cw_tolerates_rank_deficient_core():
    rng = np.random.default_rng(17)
    A = np.outer(rng.standard_normal(8), rng.standard_normal(6))
    F = cw(A, rng.standard_normal((4, 8)), rng.standard_normal((6, 2)))
    assert np.linalg.norm(A - F.reconstruct()) <= 1e-9 * np.linalg.norm(A)


# ---------------------------------------------------------------------------
# factorization container


def test_zero_matrix_round_trip():
    A = np.zeros((6, 5))
    F = cw(A, np.random.default_rng(18).standard_normal((3, 6)),
           np.random.default_rng(19).standard_normal((5, 2)))
    assert_allclose(F.reconstruct(), np.zeros((6, 5)))
    assert_allclose(F.apply(np.ones(5)), np.zeros(6))


@pytest.mark.parametrize("algo", ["glu", "rlu", "rqr", "prr_rlu", "cw"])
def test_apply_matches_reconstruct_columns(algo):
    rng = np.random.default_rng(20)
    A = rng.standard_normal((9, 7))
    U1 = rng.standard_normal((5 if algo in ("glu", "cw") else 3, 9))
    V1 = rng.standard_normal((7, 3))
    F = factorize(A, algo, U1=U1, V1=V1)
    R = F.reconstruct()
    cols = np.column_stack([F.apply(e) for e in np.eye(7)])
    assert np.linalg.norm(cols - R) <= 1e-12 * max(np.linalg.norm(R), 1.0)
    assert abs(np.linalg.norm(R) - np.sqrt(sum(F.apply(e) @ F.apply(e) for e in np.eye(7)))) \
        <= 1e-10 * max(np.linalg.norm(R), 1.0)


def test_apply_rejects_wrong_length():
    rng = np.random.default_rng(21)
    F = rqr(rng.standard_normal((6, 5)), rng.standard_normal((5, 2)))
    with pytest.raises(ValueError):
        F.apply(np.ones(6))


@pytest.mark.parametrize("algo,rank_cap", [("glu", 5), ("rlu", 3), ("rqr", 3), ("prr_rlu", 3), ("cw", 3)])
def test_reconstruction_rank_caps(algo, rank_cap):
    rng = np.random.default_rng(22)
    A = rng.standard_normal((12, 10))
    U1 = rng.standard_normal((5 if algo in ("glu", "cw") else 3, 12))
    V1 = rng.standard_normal((10, 3))
    F = factorize(A, algo, U1=U1, V1=V1)
    s = np.linalg.svd(F.reconstruct(), compute_uv=False)
    assert np.sum(s > 1e-10 * s[0]) <= rank_cap


def test_exact_recovery_all_algorithms():
    rng = np.random.default_rng(23)
    A = rng.standard_normal((20, 4)) @ rng.standard_normal((4, 15))
    nA = np.linalg.norm(A)
    U1_rect = rng.standard_normal((6, 20))
    U1_sq = rng.standard_normal((4, 20))
    V1 = rng.standard_normal((15, 4))
    for F in (glu(A, U1_rect, V1), rlu(A, U1_sq, V1), rqr(A, V1), prr_rlu(A, V1), cw(A, U1_rect, V1)):
        assert np.linalg.norm(A - F.reconstruct()) <= 1e-9 * nA


def test_factorize_rejects_unknown_algo():
    with pytest.raises(ValueError):
        factorize(np.eye(3), "power_iteration")
