"""Power method with exponential boosting of the post-selection probability.

Pipeline for a Hermitian ``A`` with sparsity ``s``:

1. encode ``(A/s)^k`` by repeated products of the ``A/s`` encoding;
2. prepare ``|Phi> = CNOT_copy U_{A^k} |0>|x0>`` and encode the reduced
   density matrix; its flag-0 corner is
   ``rho_k = |x_k|^2 / s^{2k} |x_k><x_k|``;
3. multiply by the encoding of ``|x0><x0|`` to get
   ``rho~_k = zeta_k |x_k><x0|``;
4. transform the singular value ``zeta_k`` with ``P ~ (1/2) exp(-beta(1-x))``,
   apply to ``|0>|x0>`` and post-select the flag; success probability is
   about ``(1/4) exp(-2 beta (1 - zeta_k))`` instead of ``zeta_k^2``;
5. read ``<x_k|A/s|x_k>`` with a Hadamard test and multiply by ``s``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from qsvtkit._config import spawn_rngs
from qsvtkit.blockenc import (
    SparseHermitian,
    StatePrep,
    apply_to_state,
    compress,
    density_from_state_prep,
    encode_sparse_hermitian,
    product,
    state_prep_unitary,
)
from qsvtkit.estimate import MODES, hadamard_test, hoeffding_shots
from qsvtkit.qsvt import apply_svt, exp_poly

__all__ = [
    "BoostedState",
    "PowerMethodConfig",
    "PowerMethodResult",
    "boosted_state_prep",
    "default_iterations",
    "estimate_lambda_max",
    "naive_success_probability",
    "overlap_lower_bound_check",
    "power_encoding",
    "power_iterate",
    "rho_k_encoding",
    "rho_tilde_encoding",
]

_CNOT_FLAG_TO_COPY = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)  # basis |copy, flag>; flips copy when flag is 1


def default_iterations(eps, n):
    """``ceil(log2(1/eps) + log2(n)/2)`` iterations (base 2: register width)."""
    return max(1, math.ceil(math.log2(1 / eps) + 0.5 * math.log2(n)))


@dataclass(frozen=True)
class PowerMethodConfig:
    k: int = None
    beta: float = 0.01
    eps: float = 1e-2
    eps_poly: float = 1e-6
    mode: str = "exact"
    seed: int = 0
    shots: int = None

    def __post_init__(self):
        if not 0 < self.beta <= 0.1:
            raise ValueError(f"beta must lie in (0, 0.1], got {self.beta}")
        if not 0 < self.eps < 0.5:
            raise ValueError(f"eps must lie in (0, 1/2), got {self.eps}")
        if not 0 < self.eps_poly <= 0.5:
            raise ValueError(f"eps_poly must lie in (0, 1/2], got {self.eps_poly}")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be positive")

    def iterations(self, n):
        return self.k if self.k is not None else default_iterations(self.eps, n)


@dataclass(frozen=True)
class PowerMethodResult:
    lambda_est: float
    lambda_abs: float
    zeta_k: float
    p_success: float
    x_k_norm: float
    overlap_x0_xk: float
    queries: int
    k: int
    mode: str
    trials: int = 1
    shots: int = 0
    stderr: float = 0.0

    def to_dict(self):
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


@dataclass(frozen=True, eq=False)
class BoostedState:
    state: StatePrep
    p_success: float
    trials: int
    zeta_k: float
    encoding: object = field(repr=False)
    report: object = None


def _as_matrix(mat):
    return mat if isinstance(mat, SparseHermitian) else SparseHermitian.from_dense(mat)


def _default_x0(mat):
    v = np.zeros(mat.dim, dtype=complex)
    v[: mat.orig_dim] = 1.0
    return StatePrep.from_vector(v)


def _x0_state(mat, x0):
    if x0 is None:
        return _default_x0(mat)
    if isinstance(x0, StatePrep):
        state = x0
    else:
        v = np.zeros(mat.dim, dtype=complex)
        raw = np.asarray(x0, dtype=complex).ravel()
        v[: raw.size] = raw
        state = StatePrep.from_vector(v)
    if state.dim != mat.dim:
        raise ValueError(f"x0 has dimension {state.dim}, matrix has {mat.dim}")
    return state


def power_iterate(mat, k, x0=None):
    """Classical reference: ``(x_k, |x_k|, <x0|x_k>/|x_k|)`` with ``x_k = A^k x0``."""
    mat = _as_matrix(mat)
    x0 = _x0_state(mat, x0).amplitudes
    xk = x0.copy()
    dense = mat.to_dense()
    for _ in range(k):
        xk = dense @ xk
    norm = float(np.linalg.norm(xk))
    overlap = complex(np.vdot(x0, xk) / norm) if norm > 0 else 0j
    return xk, norm, overlap


def power_encoding(mat, k):
    """Encoding of ``(A/s)^k`` (``k`` products, re-compressed after each)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    base = encode_sparse_hermitian(_as_matrix(mat))
    out = base
    for _ in range(k - 1):
        out = compress(product(base, out))
    return out


def rho_k_encoding(mat, k, x0=None):
    """Encoding of ``rho_k = |x_k|^2 / s^{2k} |x_k><x_k|``."""
    mat = _as_matrix(mat)
    x0 = _x0_state(mat, x0)
    n = mat.dim
    uk = power_encoding(mat, k)
    inner = uk.unitary @ np.kron(np.eye(2), state_prep_unitary(x0.amplitudes))
    prep = np.kron(_CNOT_FLAG_TO_COPY, np.eye(n)) @ np.kron(np.eye(2), inner)
    rho = density_from_state_prep(prep, (2, 2, n), traced=[0], query_cost=uk.query_cost)
    # the flag qubit of the kept register becomes an ancilla
    return compress(rho.absorb(1))


def rho_tilde_encoding(mat, k, x0=None):
    """Encoding of ``rho~_k = rho_k |x0><x0| = zeta_k |x_k><x0|``."""
    mat = _as_matrix(mat)
    x0 = _x0_state(mat, x0)
    proj = density_from_state_prep(state_prep_unitary(x0.amplitudes), (mat.dim,), traced=[])
    return compress(product(rho_k_encoding(mat, k, x0), proj))


def naive_success_probability(mat, k, x0=None):
    """``|zeta_k|^2 = |x_k|^4 / s^{4k} |<x0|x_k>|^2``."""
    mat = _as_matrix(mat)
    _, norm, overlap = power_iterate(mat, k, x0)
    return float(norm**4 / mat.sparsity ** (4 * k) * abs(overlap) ** 2)


def overlap_lower_bound_check(mat, k, x0=None):
    """Return ``(|<x0|x_k>|, 1/kappa^k, passed)``."""
    mat = _as_matrix(mat)
    _, _, overlap = power_iterate(mat, k, x0)
    bound = mat.kappa ** (-k)
    return abs(overlap), bound, bool(abs(overlap) >= bound - 1e-12)


def boosted_state_prep(mat, config=None, x0=None):
    """Boost ``rho~_k`` with the exponential polynomial and post-select.

    Exact mode returns the normalized flag-0 branch.  Sampled mode also
    simulates repeat-until-success Bernoulli trials, capped at
    ``ceil(40 / p_success)``.
    """
    config = config or PowerMethodConfig()
    mat = _as_matrix(mat)
    x0 = _x0_state(mat, x0)
    k = config.iterations(mat.orig_dim)
    tilde = rho_tilde_encoding(mat, k, x0)
    zeta = float(np.linalg.svd(tilde.block, compute_uv=False)[0])
    boosted, report = apply_svt(tilde, exp_poly(config.beta, config.eps_poly))
    branch = apply_to_state(boosted, x0)[: mat.dim]
    p = float(np.vdot(branch, branch).real)
    if p < 1e-12:
        raise RuntimeError(f"post-selection branch vanished (p = {p:.3e})")
    state = branch / math.sqrt(p)
    # fix the global phase so that <x0|x_k> is real and nonnegative
    phase = np.vdot(x0.amplitudes, state)
    if abs(phase) > 0:
        state = state * (abs(phase) / phase)
    trials = 1
    if config.mode == "sampled":
        rng = spawn_rngs(config.seed, 2)[0]
        cap = math.ceil(40 / p)
        trials = 0
        while True:
            trials += 1
            if rng.random() < p:
                break
            if trials >= cap:
                raise RuntimeError(f"post-selection failed {cap} times (p = {p:.3g})")
    return BoostedState(StatePrep.from_vector(state), p, trials, zeta, boosted, report)


def estimate_lambda_max(mat, config=None, x0=None):
    """Estimate the dominant eigenvalue of ``A`` from the boosted state.

    Readout is a Hadamard test of the ``A/s`` encoding on ``|x_k>``,
    rescaled by ``s``.  In sampled mode the default shot count targets
    additive error ``eps`` on the eigenvalue.
    """
    config = config or PowerMethodConfig()
    mat = _as_matrix(mat)
    x0 = _x0_state(mat, x0)
    k = config.iterations(mat.orig_dim)
    boosted = boosted_state_prep(mat, config, x0)
    base = encode_sparse_hermitian(mat)
    s = mat.sparsity
    shots = None
    if config.mode == "sampled":
        shots = config.shots or hoeffding_shots(config.eps / (2 * s))
        seed = spawn_rngs(config.seed, 2)[1]
    else:
        seed = None
    est = hadamard_test(base, boosted.state, config.mode, shots, seed)
    _, norm, overlap = power_iterate(mat, k, x0)
    lam = float(est.value.real) * s
    queries = boosted.encoding.query_cost * boosted.trials + est.queries
    return PowerMethodResult(
        lambda_est=lam,
        lambda_abs=abs(lam),
        zeta_k=boosted.zeta_k,
        p_success=boosted.p_success,
        x_k_norm=norm,
        overlap_x0_xk=float(abs(overlap)),
        queries=int(queries),
        k=k,
        mode=config.mode,
        trials=boosted.trials,
        shots=int(shots or 0),
        stderr=float(est.stderr * s),
    )
