import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import chebyshev as C

from qsvtkit import blockenc as be
from qsvtkit.qsvt import ChebyshevSeries, apply_svt, cos_poly, evaluate, exp_poly, monomial_poly, sup_error

from conftest import random_contraction

XS = np.linspace(-1, 1, 4001)


def exp_target(beta):
    return lambda x: 0.5 * np.exp(-beta * (1 - x))


# ---------------------------------------------------------------- series


def test_parity_tag_checked():
    with pytest.raises(ValueError):
        ChebyshevSeries(np.array([0.1, 0.2]), "even", 1.0)


def test_sup_bound_checked():
    with pytest.raises(ValueError):
        ChebyshevSeries(np.array([0.0, 0.9]), "odd", 0.5)


def test_from_coeffs_infers_parity_and_sup():
    p = ChebyshevSeries.from_coeffs([0.0, 0.5, 0.0, -0.25])
    assert p.parity == "odd" and p.degree == 3
    assert p.sup_bound == pytest.approx(np.max(np.abs(C.chebval(XS, p.coeffs))), abs=1e-6)


def test_evaluate_domain_and_clenshaw_agree():
    p = ChebyshevSeries.from_coeffs([0.1, 0.2, 0.3])
    # direct recurrence T0 = 1, T1 = x, T2 = 2x^2 - 1
    x = 0.3
    assert evaluate(p, x) == pytest.approx(0.1 + 0.2 * x + 0.3 * (2 * x * x - 1))
    with pytest.raises(ValueError):
        evaluate(p, 1.5)


def test_json_roundtrip():
    p = exp_poly(0.05, 1e-6)
    q = ChebyshevSeries.from_json(p.to_json())
    assert np.array_equal(p.coeffs, q.coeffs) and q.parity == p.parity


# ---------------------------------------------------------------- exp_poly


def test_exp_poly_frozen_values():
    p = exp_poly(0.01, 1e-6)
    # oracle: 0.5 * exp(-0.02)
    assert 0.5 * math.exp(-0.02) == pytest.approx(0.4900993366, abs=1e-10)
    assert abs(p(-1.0) - 0.4900993) <= 1e-6
    assert p.degree == 2
    assert sup_error(p, exp_target(0.01)) <= 1e-6
    assert p.sup_bound <= 0.5


@given(st.floats(0.001, 0.1), st.sampled_from([1e-2, 1e-3, 1e-5, 1e-7, 1e-9]))
def test_exp_poly_accuracy_and_bound(beta, eps):
    p = exp_poly(beta, eps)
    err = np.max(np.abs(C.chebval(XS, p.coeffs) - exp_target(beta)(XS)))
    assert err <= eps
    assert np.max(np.abs(C.chebval(XS, p.coeffs))) <= 0.5 + 1e-12
    assert p.parity == "mixed" or p.degree == 0


def test_exp_poly_degree_grows_logarithmically():
    eps = [1e-2, 1e-4, 1e-6, 1e-8]
    degs = [exp_poly(0.01, e).degree for e in eps]
    assert degs == sorted(degs)
    assert max(d / math.log(1 / e) for d, e in zip(degs, eps)) <= 1.0


@pytest.mark.parametrize("eps", [0.0, 0.6, -1e-3])
def test_exp_poly_rejects_eps(eps):
    with pytest.raises(ValueError):
        exp_poly(0.01, eps)


def test_exp_poly_rejects_beta():
    with pytest.raises(ValueError):
        exp_poly(0.0, 1e-3)


# ---------------------------------------------------------------- cos / monomials


def test_cos_poly_two_pi():
    p = cos_poly(2 * math.pi, 1e-6)
    assert p.parity == "even"
    assert np.max(np.abs(C.chebval(XS, p.coeffs) - np.cos(2 * math.pi * XS))) <= 1e-6
    assert p.sup_bound <= 1.0


def test_cos_poly_hits_nodes():
    p = cos_poly(2 * math.pi, 1e-12)
    n = 8
    i = np.arange(n)
    assert np.allclose(p((2 * i + 1) / (4 * n)), np.cos((2 * i + 1) * math.pi / (2 * n)), atol=1e-11)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4, 7])
def test_monomial(k):
    p = monomial_poly(k)
    assert np.allclose(p(XS), XS**k, atol=1e-12)
    assert p.parity == ("even" if k % 2 == 0 else "odd")


# ---------------------------------------------------------------- apply_svt


def test_svt_hermitian_is_eigenvalue_transform(rng):
    h = random_contraction(rng, 4)
    h = (h + h.conj().T) / 2
    h /= np.linalg.norm(h, 2)
    p = monomial_poly(3)
    out, rep = apply_svt(be.encode_contraction(h), p)
    assert np.allclose(out.block, h @ h @ h, atol=1e-12)
    assert rep.degree == 3


@given(st.integers(0, 2**32 - 1))
def test_svt_odd_poly_on_general_matrix(seed):
    rng = np.random.default_rng(seed)
    b = random_contraction(rng, 4, 0.9)
    out, _ = apply_svt(be.encode_contraction(b), monomial_poly(3))
    # odd singular value transform of x^3 is B B^dagger B
    assert np.allclose(out.block, b @ b.conj().T @ b, atol=1e-12)


def test_svt_mixed_parity_uses_full_svd():
    b = np.array([[0.0, 0.5], [0.0, 0.0]])
    p = ChebyshevSeries.from_coeffs([0.25, 0.25])  # 1/4 + x/4, sup 1/2
    out, _ = apply_svt(be.encode_contraction(b), p)
    w, s, vh = np.linalg.svd(b)
    assert np.allclose(out.block, (w * (0.25 + 0.25 * s)) @ vh)


def test_svt_tiny_nonhermitian_block_not_symmetrized():
    b = np.zeros((2, 2))
    b[1, 0] = 1e-11
    p = exp_poly(0.01, 1e-6)
    out, _ = apply_svt(be.encode_contraction(b), p)
    # the right singular vector for 1e-11 is |0>, mapped to |1>
    assert abs(out.block[1, 0]) > 0.4 and abs(out.block[0, 1]) < 0.5


def test_svt_bound_depends_on_parity():
    mixed = ChebyshevSeries.from_coeffs([0.4, 0.4])
    with pytest.raises(ValueError, match="mixed"):
        apply_svt(be.identity_encoding(2), mixed)
    apply_svt(be.encode_contraction(np.eye(2) * 0.5), monomial_poly(2))


def test_svt_error_and_cost_accounting():
    enc = be.encode_contraction(np.diag([0.5, 0.1]), alpha=2.0, epsilon=1e-6, query_cost=3)
    p = exp_poly(0.01, 1e-6)
    out, rep = apply_svt(enc, p)
    assert rep.output_epsilon == pytest.approx(4 * p.degree * math.sqrt(1e-6 / 2) + p.approx_error)
    assert rep.queries == p.degree * 3 == out.query_cost
    assert out.epsilon == rep.output_epsilon
