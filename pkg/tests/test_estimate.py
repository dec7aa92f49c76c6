import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qsvtkit import blockenc as be
from qsvtkit.estimate import (
    EstimationResult,
    exact_amplitude,
    hadamard_test,
    hoeffding_shots,
    sampled_probability,
    swap_test,
)

from conftest import random_contraction, random_unit


def test_result_invariants():
    with pytest.raises(ValueError):
        EstimationResult(0.5, "exact", stderr=0.1)
    with pytest.raises(ValueError):
        EstimationResult(0.5, "noisy")


def test_hoeffding_formula():
    assert hoeffding_shots(0.01) == math.ceil(math.log(40) / (2 * 1e-4))
    with pytest.raises(ValueError):
        hoeffding_shots(0)


def test_exact_amplitude_cases():
    assert exact_amplitude(be.StatePrep.basis(4, 0), 0) == 1
    assert exact_amplitude(be.StatePrep.basis(4, 0), [1, 2]) == 0
    assert exact_amplitude(np.array([0.6, 0.8j]), 1) == pytest.approx(0.8j)
    with pytest.raises(IndexError):
        exact_amplitude(be.StatePrep.basis(2), 5)
    with pytest.raises(ValueError):
        exact_amplitude(np.array([1.0, 1.0]), 0)


def test_sampled_probability_deterministic_and_accurate():
    psi = np.array([0.5, math.sqrt(0.75)])
    r1 = sampled_probability(psi, [0], 10_000, seed=3)
    r2 = sampled_probability(psi, [0], 10_000, seed=3)
    assert r1 == r2
    assert abs(r1.value - 0.25) <= 0.015
    assert r1.stderr == pytest.approx(math.sqrt(r1.value * (1 - r1.value) / 10_000))
    assert sampled_probability(be.StatePrep.basis(2), [0], 10, seed=0).value == 1.0


@given(st.integers(0, 2**32 - 1))
def test_hadamard_test_equals_quadratic_form(seed):
    rng = np.random.default_rng(seed)
    b = random_contraction(rng, 4)
    psi = random_unit(rng, 4)
    res = hadamard_test(be.encode_contraction(b), psi)
    assert res.value == pytest.approx(np.vdot(psi, b @ psi).real, abs=1e-10)


def test_hadamard_test_identity_and_traceless():
    assert hadamard_test(be.identity_encoding(2), be.StatePrep.uniform(2)).value == pytest.approx(1.0)
    z = be.encode_contraction(np.diag([1.0, -1.0]))
    assert hadamard_test(z, be.StatePrep.uniform(2)).value == pytest.approx(0.0, abs=1e-12)


def test_hadamard_test_sampled_requires_shots_and_counts_queries():
    enc = be.encode_contraction(np.diag([0.5, 0.5]), query_cost=3)
    with pytest.raises(ValueError):
        hadamard_test(enc, be.StatePrep.uniform(2), "sampled")
    res = hadamard_test(enc, be.StatePrep.uniform(2), "sampled", shots=1000, seed=1)
    assert res.queries == 3000 and res.shots_used == 1000
    with pytest.raises(ValueError):
        hadamard_test(enc, be.StatePrep.uniform(4))


def test_sampled_error_shrinks_with_shots():
    enc = be.encode_contraction(np.diag([0.3, 0.1]))
    psi = be.StatePrep.uniform(2)
    truth = 0.2

    def rms(shots):
        errs = [hadamard_test(enc, psi, "sampled", shots, seed).value - truth for seed in range(50)]
        return math.sqrt(np.mean(np.square(errs)))

    assert rms(4000) <= rms(1000)


def test_swap_test_cases():
    a = be.StatePrep.basis(2, 0)
    assert swap_test(a, a).value == pytest.approx(1.0)
    assert swap_test(a, be.StatePrep.basis(2, 1)).value == pytest.approx(0.0)
    u = be.StatePrep.uniform(2)
    assert swap_test(a, u).value == pytest.approx(0.5)
    with pytest.raises(ValueError):
        swap_test(a, be.StatePrep.uniform(4))


@given(st.integers(0, 2**32 - 1), st.integers(1, 200))
def test_swap_test_in_unit_interval(seed, shots):
    rng = np.random.default_rng(seed)
    r = swap_test(random_unit(rng, 4), random_unit(rng, 4), shots=shots, seed=seed)
    assert 0.0 <= r.value <= 1.0
