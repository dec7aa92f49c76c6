import numpy as np
import pytest

from qsvtkit._config import DEFAULT_TOL, TOL_ENV_VAR, make_rng, spawn_rngs, tolerance


def test_default_tolerance(monkeypatch):
    monkeypatch.delenv(TOL_ENV_VAR, raising=False)
    assert tolerance() == DEFAULT_TOL == 1e-10


def test_env_override(monkeypatch):
    monkeypatch.setenv(TOL_ENV_VAR, "1e-6")
    assert tolerance() == 1e-6


def test_env_rejects_nonpositive(monkeypatch):
    monkeypatch.setenv(TOL_ENV_VAR, "0")
    with pytest.raises(ValueError):
        tolerance()


def test_rng_is_philox_and_deterministic():
    a, b = make_rng(7), make_rng(7)
    assert isinstance(a.bit_generator, np.random.Philox)
    assert np.array_equal(a.random(5), b.random(5))


def test_generator_passthrough():
    g = make_rng(1)
    assert make_rng(g) is g


def test_spawned_streams_are_reproducible_and_distinct():
    s1, s2 = spawn_rngs(99, 2)
    t1, _ = spawn_rngs(99, 2)
    x = s1.random(4)
    assert np.array_equal(x, t1.random(4))
    assert not np.array_equal(x, s2.random(4))


def test_u64_seed_accepted():
    assert 0 <= make_rng(2**64 - 1).random() < 1
