"""Shared numerical tolerance and random number generation."""

import os

import numpy as np

DEFAULT_TOL = 1e-10
TOL_ENV_VAR = "QSVTKIT_TOL"

# Above this dimension unitarity is certified with random probes instead of
# forming U^dagger U (a single-core 2048x2048 complex product takes ~1 s).
EXACT_UNITARITY_MAX_DIM = 1024


def tolerance():
    """Numerical tolerance, overridable through ``QSVTKIT_TOL``."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None or raw == "":
        return DEFAULT_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{TOL_ENV_VAR} must be positive, got {raw!r}")
    return value


def make_rng(seed):
    """Return a Philox (counter-based) generator for ``seed``.

    ``seed`` may be an int, a :class:`numpy.random.SeedSequence` or an
    existing generator (returned unchanged).  Child streams are obtained with
    :func:`spawn_rngs`, which splits the underlying seed sequence, so every
    random quantity in a run derives from the single top-level seed.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(None if seed is None else int(seed) & (2**64 - 1))
    return np.random.Generator(np.random.Philox(seed))


def spawn_rngs(seed, n):
    """Split ``seed`` into ``n`` independent Philox generators."""
    if isinstance(seed, np.random.Generator):
        seqs = seed.bit_generator.seed_seq.spawn(n)
    else:
        if not isinstance(seed, np.random.SeedSequence):
            seed = np.random.SeedSequence(None if seed is None else int(seed) & (2**64 - 1))
        seqs = seed.spawn(n)
    return [np.random.Generator(np.random.Philox(s)) for s in seqs]
