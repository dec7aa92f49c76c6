import math

import numpy as np
import pytest

from qsvtkit import blockenc as be
from qsvtkit.instances import random_hermitian, random_sparse_hermitian
from qsvtkit.powermethod import (
    PowerMethodConfig,
    boosted_state_prep,
    default_iterations,
    estimate_lambda_max,
    naive_success_probability,
    overlap_lower_bound_check,
    power_encoding,
    power_iterate,
    rho_k_encoding,
    rho_tilde_encoding,
)

DIAG = be.SparseHermitian.from_dense(np.diag([0.9, 0.5]))
EYE = be.SparseHermitian.from_dense(np.eye(2))


def rayleigh_oracle(a, x0, k):
    x = np.array(x0, dtype=complex)
    for _ in range(k):
        x = a @ x
    x /= np.linalg.norm(x)
    return np.vdot(x, a @ x).real


def test_config_validation():
    for bad in [dict(beta=0), dict(beta=0.2), dict(eps=0.5), dict(k=0), dict(mode="fast"), dict(shots=0),
                dict(eps_poly=0.7)]:
        with pytest.raises(ValueError):
            PowerMethodConfig(**bad)


def test_default_iterations_base_two():
    assert default_iterations(1e-2, 16) == math.ceil(math.log2(100) + 2) == 9


def test_power_encoding_diag_fixture():
    assert np.allclose(power_encoding(DIAG, 4).block, np.diag([0.6561, 0.0625]))
    assert np.allclose(power_encoding(DIAG, 1).block, np.diag([0.9, 0.5]))
    assert np.allclose(power_encoding(EYE, 5).block, np.eye(2))
    assert power_encoding(DIAG, 4).query_cost == 4
    with pytest.raises(ValueError):
        power_encoding(DIAG, 0)


def test_power_encoding_divides_by_sparsity():
    m = random_sparse_hermitian(8, 3, seed=1)
    expected = np.linalg.matrix_power(m.to_dense() / 3, 3)
    assert np.allclose(power_encoding(m, 3).block, expected, atol=1e-12)


def test_rho_k_diag_fixture():
    blk = rho_k_encoding(DIAG, 2).block
    # |x_2|^2 = (0.9^4 + 0.5^4)/2 = 0.3593 exactly
    assert (0.9**4 + 0.5**4) / 2 == pytest.approx(0.3593, abs=1e-15)
    x2 = np.array([0.81, 0.25]) / math.sqrt(2)
    assert np.allclose(blk, np.outer(x2, x2))
    assert np.trace(blk).real == pytest.approx(0.3593, abs=1e-12)


def test_rho_k_identity_is_projector():
    assert np.allclose(rho_k_encoding(EYE, 3).block, np.full((2, 2), 0.5))


def test_rho_tilde_rank_one_with_zeta():
    m = random_sparse_hermitian(8, 2, seed=5, kappa=4)
    k = 3
    blk = rho_tilde_encoding(m, k).block
    xk, norm, overlap = power_iterate(m, k)
    zeta = norm**2 / m.sparsity ** (2 * k) * abs(overlap)
    sv = np.linalg.svd(blk, compute_uv=False)
    assert np.sum(sv > 1e-10) == 1
    assert sv[0] == pytest.approx(zeta, abs=1e-9)
    x0 = np.ones(8) / math.sqrt(8)
    assert np.allclose(blk, zeta * np.outer(xk / norm, x0) * overlap / abs(overlap), atol=1e-12)


def test_rho_tilde_identity():
    blk = rho_tilde_encoding(EYE, 2).block
    assert np.allclose(blk, np.full((2, 2), 0.5))


def test_custom_x0_and_dimension_check():
    x0 = np.array([0.6, 0.8])
    blk = rho_tilde_encoding(DIAG, 1, x0).block
    x1 = np.array([0.54, 0.4])
    zeta = np.dot(x1, x1) * np.dot(x1, x0) / np.linalg.norm(x1)
    assert np.linalg.svd(blk, compute_uv=False)[0] == pytest.approx(zeta)
    with pytest.raises(ValueError):
        rho_tilde_encoding(DIAG, 1, be.StatePrep.uniform(4))


def test_naive_success_probability():
    assert naive_success_probability(EYE, 4) == pytest.approx(1.0)
    p = naive_success_probability(DIAG, 2)
    x2 = np.array([0.81, 0.25]) / math.sqrt(2)
    direct = np.dot(x2, x2) ** 2 * (np.dot(x2, [1, 1]) / math.sqrt(2)) ** 2 / np.dot(x2, x2)
    assert p == pytest.approx(direct)
    assert p >= 1 / (DIAG.sparsity ** 8 * DIAG.kappa ** 12)


def test_boosted_identity_probability():
    b = boosted_state_prep(EYE, PowerMethodConfig(k=2))
    assert b.p_success == pytest.approx(0.25, abs=1e-6)


def test_boosted_state_fidelity_diag_fixture():
    cfg = PowerMethodConfig(k=2)
    b = boosted_state_prep(DIAG, cfg)
    x2 = np.array([0.81, 0.25]) / np.linalg.norm([0.81, 0.25])
    assert abs(np.vdot(x2, b.state.amplitudes)) ** 2 >= 1 - 10 * cfg.eps_poly
    assert 0.2401 - 1e-6 <= b.p_success <= 0.25 + 1e-6


def test_boosted_sampled_trials_deterministic():
    cfg = PowerMethodConfig(k=2, mode="sampled", seed=11)
    a, b = boosted_state_prep(DIAG, cfg), boosted_state_prep(DIAG, cfg)
    assert a.trials == b.trials >= 1


def test_estimate_diag_fixture_frozen():
    r = estimate_lambda_max(DIAG, PowerMethodConfig(k=4))
    # oracle: (0.9^9 + 0.5^9) / (0.9^8 + 0.5^8)
    assert (0.9**9 + 0.5**9) / (0.9**8 + 0.5**8) == pytest.approx(0.8964028649448335, abs=1e-15)
    assert r.lambda_est == pytest.approx(0.8964028649448335, abs=1e-10)
    assert r.zeta_k == pytest.approx(r.x_k_norm**2 * r.overlap_x0_xk, abs=1e-9)
    assert 0 <= r.p_success <= 1


def test_estimate_identity():
    assert estimate_lambda_max(EYE, PowerMethodConfig(k=3)).lambda_est == pytest.approx(1.0)


def test_negative_dominant_eigenvalue_is_signed():
    a = be.SparseHermitian.from_dense(np.diag([-0.9, 0.5]))
    r = estimate_lambda_max(a, PowerMethodConfig(k=4))
    expected = (-(0.9**9) + 0.5**9) / (0.9**8 + 0.5**8)
    assert expected == pytest.approx(-0.887410027306917, abs=1e-12)
    assert r.lambda_est == pytest.approx(expected, abs=1e-10)
    assert r.lambda_abs == pytest.approx(-expected, abs=1e-10)


def test_pipeline_matches_classical_power_iterate():
    m = random_sparse_hermitian(16, 3, seed=2, kappa=8, min_gap=0.1)
    r = estimate_lambda_max(m, PowerMethodConfig(k=5))
    x0 = np.ones(16) / 4
    assert r.lambda_est == pytest.approx(rayleigh_oracle(m.to_dense(), x0, 5), abs=1e-9)
    assert r.zeta_k == pytest.approx(r.x_k_norm**2 / 3**10 * r.overlap_x0_xk, abs=1e-9)
    assert r.overlap_x0_xk >= 8.0**-5 - 1e-9


def test_sampled_mode_reproducible_and_accurate():
    cfg = PowerMethodConfig(k=6, mode="sampled", seed=3, eps=0.02)
    r1, r2 = estimate_lambda_max(DIAG, cfg), estimate_lambda_max(DIAG, cfg)
    assert r1 == r2
    exact = estimate_lambda_max(DIAG, PowerMethodConfig(k=6)).lambda_est
    assert abs(r1.lambda_est - exact) <= 0.02
    assert r1.shots > 0 and r1.stderr > 0


def test_monotone_convergence_for_diagonal():
    a = be.SparseHermitian.from_dense(np.diag([0.95, 0.7, 0.4, 0.2]))
    errs = [abs(estimate_lambda_max(a, PowerMethodConfig(k=k)).lambda_est - 0.95) for k in range(1, 8)]
    assert all(e2 <= e1 + 1e-12 for e1, e2 in zip(errs, errs[1:]))


def test_overlap_bound_check():
    assert overlap_lower_bound_check(EYE, 3) == (pytest.approx(1.0), 1.0, True)
    ov, bound, ok = overlap_lower_bound_check(DIAG, 4)
    assert bound == 1 / 16 and ok and ov > bound
    for seed in range(10):
        m = be.SparseHermitian.from_dense(random_hermitian(8, seed=seed, kappa=5), kappa=5)
        assert overlap_lower_bound_check(m, 6)[2]
