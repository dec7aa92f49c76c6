"""Amplitude, overlap and expectation estimation on simulated statevectors.

Two modes everywhere: ``"exact"`` reads the quantity off the statevector;
``"sampled"`` draws binomial shot counts from the exact outcome
probability with a seeded generator.  Amplitude estimation proper is not
simulated; :func:`hoeffding_shots` gives the shot budget for a target
accuracy.
"""

from dataclasses import dataclass
import math

import numpy as np

from qsvtkit._config import make_rng
from qsvtkit.blockenc import StatePrep

__all__ = [
    "EstimationResult",
    "MODES",
    "exact_amplitude",
    "hadamard_test",
    "hoeffding_shots",
    "sampled_probability",
    "swap_test",
]

MODES = ("exact", "sampled")


@dataclass(frozen=True)
class EstimationResult:
    value: complex
    mode: str
    shots_used: int = 0
    stderr: float = 0.0
    queries: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")
        if self.mode == "exact" and self.stderr != 0:
            raise ValueError("exact results carry no stderr")


def hoeffding_shots(eps, delta_fail=0.05):
    """Shots so that a probability estimate is within ``eps`` w.p. ``1 - delta_fail``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return math.ceil(math.log(2 / delta_fail) / (2 * eps**2))


def _vector(state):
    if isinstance(state, StatePrep):
        return state.amplitudes
    return np.asarray(state, dtype=complex).ravel()


def _check_normalized(vec):
    norm = np.linalg.norm(vec)
    if abs(norm - 1) > 1e-9:
        raise ValueError(f"state is not normalized (norm {norm!r})")


def _indices(vec, projector):
    idx = np.atleast_1d(np.asarray(projector, dtype=int))
    if np.any(idx < 0) or np.any(idx >= vec.size):
        raise IndexError(f"basis index out of range for a state of size {vec.size}")
    return idx


def exact_amplitude(state, projector):
    """Amplitude of ``state`` on a basis index.

    For a single index this is ``<i|state>`` (complex).  For a collection of
    indices it is the norm of the projection onto their span.
    """
    vec = _vector(state)
    _check_normalized(vec)
    idx = _indices(vec, projector)
    if np.ndim(projector) == 0:
        return complex(vec[idx[0]])
    return complex(np.linalg.norm(vec[idx]))


def _binomial_estimate(p, shots, seed):
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = make_rng(seed)
    hits = rng.binomial(int(shots), min(max(p, 0.0), 1.0))
    p_hat = hits / shots
    return p_hat, math.sqrt(p_hat * (1 - p_hat) / shots)


def sampled_probability(state, projector, shots, seed=None):
    """Binomial estimate of the probability of landing in ``projector``."""
    vec = _vector(state)
    _check_normalized(vec)
    idx = _indices(vec, projector)
    p = float(np.sum(np.abs(vec[idx]) ** 2))
    p_hat, err = _binomial_estimate(p, shots, seed)
    return EstimationResult(p_hat, "sampled", int(shots), err, 0)


def hadamard_test(enc, psi, mode="exact", shots=None, seed=None):
    """Estimate ``Re <psi|B|psi>`` for the block ``B`` of ``enc``.

    The circuit is ``H`` on a control qubit, controlled-``U`` on
    ``|0>_a|psi>``, ``H`` again; the control reads 0 with probability
    ``(1 + Re <psi|B|psi>) / 2``.
    """
    vec = _vector(psi)
    if vec.size != enc.system_dim:
        raise ValueError(f"state dimension {vec.size} != system_dim {enc.system_dim}")
    _check_normalized(vec)
    chi = np.zeros(enc.dim, dtype=complex)
    chi[: enc.system_dim] = vec
    u_chi = enc.unitary @ chi
    p0 = float(np.linalg.norm(chi + u_chi) ** 2 / 4)
    if mode == "exact":
        return EstimationResult(2 * p0 - 1, "exact", 0, 0.0, max(enc.query_cost, 1))
    if mode != "sampled":
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if shots is None:
        raise ValueError("sampled mode needs a shot count")
    p_hat, err = _binomial_estimate(p0, shots, seed)
    return EstimationResult(2 * p_hat - 1, "sampled", int(shots), 2 * err, int(shots) * max(enc.query_cost, 1))


def swap_test(psi1, psi2, shots=None, seed=None):
    """Estimate ``|<psi1|psi2>|^2``; exact when ``shots`` is None.

    The ancilla reads 0 with probability ``(1 + |<psi1|psi2>|^2) / 2``.
    Only the magnitude of the overlap is recoverable.
    """
    a, b = _vector(psi1), _vector(psi2)
    if a.size != b.size:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    _check_normalized(a)
    _check_normalized(b)
    ab, ba = np.kron(a, b), np.kron(b, a)
    p0 = float(np.linalg.norm(ab + ba) ** 2 / 4)
    if shots is None:
        return EstimationResult(min(max(2 * p0 - 1, 0.0), 1.0), "exact")
    p_hat, err = _binomial_estimate(p0, shots, seed)
    return EstimationResult(min(max(2 * p_hat - 1, 0.0), 1.0), "sampled", int(shots), 2 * err)
