"""Block encodings realized as explicit dense unitaries.

A :class:`BlockEncoding` stores a unitary ``U`` acting on an ancilla register
of ``2**ancilla_count`` levels followed by a system register of
``system_dim`` levels (ancilla-major ordering).  The encoded block is the
top-left ``system_dim x system_dim`` corner of ``U``::

    B = (<0|_a (x) I) U (|0>_a (x) I)

Every combinator here returns a new encoding; nothing is mutated in place.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from qsvtkit._config import EXACT_UNITARITY_MAX_DIM, tolerance

__all__ = [
    "BlockEncoding",
    "SparseHermitian",
    "StatePrep",
    "amplify",
    "amplification_queries",
    "apply_to_state",
    "compress",
    "density_from_state_prep",
    "diagonal_from_state",
    "dilate",
    "dump_unitary_csv",
    "encode_contraction",
    "encode_sparse_hermitian",
    "extract_block",
    "identity_encoding",
    "linear_combination",
    "pad_ancillas",
    "product",
    "scale",
    "state_prep_unitary",
    "tensor",
]


def is_power_of_two(n):
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


def next_power_of_two(n):
    return 1 << max(0, int(n - 1).bit_length())


def _log2(n):
    if not is_power_of_two(n):
        raise ValueError(f"dimension {n} is not a power of two")
    return int(n).bit_length() - 1


def _unitarity_defect(u):
    """Max-entry deviation of ``U^dagger U`` from the identity.

    Large matrices are probed with 8 fixed random unit vectors instead.
    """
    dim = u.shape[0]
    if dim <= EXACT_UNITARITY_MAX_DIM:
        return float(np.max(np.abs(u.conj().T @ u - np.eye(dim))))
    rng = np.random.default_rng(0x5EED)
    probes = rng.standard_normal((dim, 8)) + 1j * rng.standard_normal((dim, 8))
    probes /= np.linalg.norm(probes, axis=0)
    return float(np.max(np.abs(u.conj().T @ (u @ probes) - probes)))


def _permute_registers(u, dims, perm):
    """Reorder the tensor factors of an operator.

    ``u`` acts on registers with sizes ``dims``; the result acts on the
    layout in which register ``i`` is old register ``perm[i]``.
    """
    k = len(dims)
    t = np.asarray(u).reshape(tuple(dims) + tuple(dims))
    t = t.transpose(tuple(perm) + tuple(p + k for p in perm))
    total = int(np.prod(dims))
    return t.reshape(total, total)


@dataclass(frozen=True, eq=False)
class StatePrep:
    """Unit-norm amplitude vector on ``m`` qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if not is_power_of_two(amps.size):
            raise ValueError(f"state length {amps.size} is not a power of two")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def m(self):
        return _log2(self.amplitudes.size)

    @property
    def dim(self):
        return self.amplitudes.size

    @classmethod
    def from_vector(cls, vec, pad=True):
        """Normalize ``vec`` (zero-padding to a power of two if ``pad``)."""
        v = np.array(vec, dtype=complex).ravel()
        if pad and not is_power_of_two(v.size):
            v = np.concatenate([v, np.zeros(next_power_of_two(v.size) - v.size)])
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(v / norm)

    @classmethod
    def uniform(cls, dim):
        return cls(np.full(dim, 1 / math.sqrt(dim), dtype=complex))

    @classmethod
    def basis(cls, dim, index=0):
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls(v)


@dataclass(frozen=True, eq=False)
class SparseHermitian:
    """Hermitian input matrix with declared sparsity and conditioning.

    ``dim`` is the padded (power of two) dimension; ``orig_dim`` the size
    of the matrix as given.  Eigenvalue magnitudes of the unpadded matrix
    must lie in ``[1/kappa, 1]`` up to the package tolerance.
    """

    dim: int
    entries: tuple
    sparsity: int
    kappa: float
    orig_dim: int = None
    _dense: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        tol = tolerance()
        orig = self.dim if self.orig_dim is None else int(self.orig_dim)
        if orig < 1:
            raise ValueError("matrix dimension must be positive")
        dim = next_power_of_two(orig)
        if self.dim not in (orig, dim):
            raise ValueError(f"dim {self.dim} inconsistent with orig_dim {orig}")
        entries = tuple((int(i), int(j), complex(v)) for i, j, v in self.entries)
        mat = np.zeros((orig, orig), dtype=complex)
        for i, j, v in entries:
            if not (0 <= i < orig and 0 <= j < orig):
                raise ValueError(f"entry ({i}, {j}) outside a {orig}x{orig} matrix")
            mat[i, j] += v
        if np.max(np.abs(mat - mat.conj().T), initial=0.0) > tol:
            raise ValueError("matrix is not Hermitian")
        row_nnz = int(np.max(np.count_nonzero(mat, axis=1), initial=0))
        if self.sparsity < 1 or row_nnz > self.sparsity:
            raise ValueError(f"row with {row_nnz} nonzeros exceeds sparsity {self.sparsity}")
        if not self.kappa >= 1:
            raise ValueError(f"kappa must be >= 1, got {self.kappa}")
        mags = np.abs(np.linalg.eigvalsh(mat))
        if mags.max() > 1 + tol:
            raise ValueError(f"eigenvalue magnitude {mags.max():.6g} exceeds 1")
        if mags.min() < 1 / self.kappa - tol:
            raise ValueError(
                f"eigenvalue magnitude {mags.min():.6g} below 1/kappa = {1 / self.kappa:.6g}"
            )
        padded = np.zeros((dim, dim), dtype=complex)
        padded[:orig, :orig] = mat
        padded.setflags(write=False)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "orig_dim", orig)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "sparsity", int(self.sparsity))
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "_dense", padded)

    @classmethod
    def from_dense(cls, mat, sparsity=None, kappa=None):
        """Build from a dense array; sparsity and kappa default to the tightest values."""
        mat = np.asarray(mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {mat.shape}")
        rows, cols = np.nonzero(mat)
        entries = [(i, j, mat[i, j]) for i, j in zip(rows, cols)]
        if sparsity is None:
            sparsity = max(1, int(np.max(np.count_nonzero(mat, axis=1), initial=0)))
        if kappa is None:
            smallest = np.min(np.abs(np.linalg.eigvalsh((mat + mat.conj().T) / 2)))
            if smallest <= 0:
                raise ValueError("matrix is singular; kappa is unbounded")
            kappa = max(1.0, 1.0 / smallest)
        n = mat.shape[0]
        return cls(dim=n, entries=entries, sparsity=sparsity, kappa=kappa, orig_dim=n)

    def to_dense(self, padded=True):
        if padded:
            return np.array(self._dense)
        return np.array(self._dense[: self.orig_dim, : self.orig_dim])

    def eigvalsh(self):
        """Eigenvalues of the unpadded matrix, ascending."""
        return np.linalg.eigvalsh(self.to_dense(padded=False))

    @property
    def lambda_max(self):
        """Eigenvalue of largest magnitude (signed)."""
        evals = self.eigvalsh()
        return float(evals[np.argmax(np.abs(evals))])


@dataclass(frozen=True, eq=False)
class BlockEncoding:
    """Unitary whose top-left block encodes ``A_target / alpha``.

    Attributes
    ----------
    unitary : ndarray
        Dense ``(2**ancilla_count * system_dim)``-square unitary.
    ancilla_count : int
        Number of ancilla qubits (leading register).
    system_dim : int
        Dimension of the system register.
    alpha : float
        Scale relating the block to the target matrix.
    epsilon : float
        Worst-case spectral-norm error of the block against ``A_target / alpha``.
    query_cost : int
        Accumulated uses of primitive encodings.
    """

    unitary: np.ndarray
    ancilla_count: int
    system_dim: int
    alpha: float = 1.0
    epsilon: float = 0.0
    query_cost: int = 0

    def __post_init__(self):
        tol = tolerance()
        u = np.array(self.unitary, dtype=complex)
        a, n = int(self.ancilla_count), int(self.system_dim)
        if a < 0 or n < 1:
            raise ValueError("ancilla_count must be >= 0 and system_dim >= 1")
        expected = (2**a) * n
        if u.shape != (expected, expected):
            raise ValueError(f"unitary shape {u.shape} != ({expected}, {expected})")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.epsilon < 0 or self.query_cost < 0:
            raise ValueError("epsilon and query_cost must be nonnegative")
        defect = _unitarity_defect(u)
        if defect > tol:
            raise ValueError(f"matrix is not unitary (defect {defect:.3e})")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "ancilla_count", a)
        object.__setattr__(self, "system_dim", n)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "query_cost", int(self.query_cost))

    @property
    def dim(self):
        return self.unitary.shape[0]

    @property
    def block(self):
        return np.array(self.unitary[: self.system_dim, : self.system_dim])

    def absorb(self, qubits=1):
        """Reinterpret the leading ``qubits`` system qubits as ancillas.

        The unitary is unchanged; the new block is the corner of the old
        block where those qubits are ``|0>``.
        """
        factor = 2**qubits
        if self.system_dim % factor:
            raise ValueError(f"cannot absorb {qubits} qubits from system of dim {self.system_dim}")
        return BlockEncoding(
            self.unitary,
            self.ancilla_count + qubits,
            self.system_dim // factor,
            self.alpha,
            self.epsilon,
            self.query_cost,
        )

    def target_error(self, target):
        """Spectral-norm distance between the block and ``target / alpha``."""
        return float(np.linalg.norm(self.block - np.asarray(target) / self.alpha, 2))


def extract_block(enc):
    """Return ``(<0|_a (x) I) U (|0>_a (x) I)``."""
    return enc.block


def dilate(block):
    """Unitary dilation ``[[B, sqrt(I-BB*)], [sqrt(I-B*B), -B*]]`` of a contraction."""
    b = np.asarray(block, dtype=complex)
    n = b.shape[0]
    tol = tolerance()
    if np.count_nonzero(b - np.diag(np.diag(b))) == 0:
        d = np.diag(b)
        if np.max(np.abs(d), initial=0.0) > 1 + tol:
            raise ValueError(f"block norm {np.max(np.abs(d)):.6g} exceeds 1")
        s = np.diag(np.sqrt(np.clip(1 - np.abs(d) ** 2, 0, None)))
        return np.block([[b, s], [s, -b.conj().T]])
    w, sv, vh = np.linalg.svd(b)
    if sv[0] > 1 + tol:
        raise ValueError(f"block norm {sv[0]:.6g} exceeds 1")
    comp = np.sqrt(np.clip(1 - sv**2, 0, None))
    top_right = (w * comp) @ w.conj().T
    bottom_left = (vh.conj().T * comp) @ vh
    u = np.block([[b, top_right], [bottom_left, -b.conj().T]])
    if n and np.max(np.abs(u.conj().T @ u - np.eye(2 * n))) > tol:
        # b is (numerically) not equal to w diag(sv) vh; rebuild it from the SVD
        b = (w * sv) @ vh
        u = np.block([[b, top_right], [bottom_left, -b.conj().T]])
    return u


def encode_contraction(block, alpha=1.0, epsilon=0.0, query_cost=0):
    """One-ancilla encoding of an arbitrary contraction via :func:`dilate`."""
    b = np.asarray(block, dtype=complex)
    return BlockEncoding(dilate(b), 1, b.shape[0], alpha, epsilon, query_cost)


def identity_encoding(n):
    """The identity encodes itself with no ancilla."""
    return BlockEncoding(np.eye(n, dtype=complex), 0, n)


def compress(enc):
    """Re-encode the same block with a single ancilla.

    Keeps ``alpha``, ``epsilon`` and ``query_cost``.  Used to keep dense
    dimensions small between pipeline stages.
    """
    return encode_contraction(enc.block, enc.alpha, enc.epsilon, enc.query_cost)


def encode_sparse_hermitian(mat):
    """Exact encoding of ``A/s`` with one ancilla.

    ``U = [[B, sqrt(I-B^2)], [sqrt(I-B^2), -B]]`` with ``B = A/s``.
    """
    if not isinstance(mat, SparseHermitian):
        mat = SparseHermitian.from_dense(mat)
    b = mat.to_dense() / mat.sparsity
    if np.linalg.norm(b, 2) > 1 + tolerance():
        raise ValueError("||A/s|| exceeds 1")
    return BlockEncoding(dilate(b), 1, mat.dim, alpha=mat.sparsity, epsilon=0.0, query_cost=1)


def pad_ancillas(enc, ancilla_count):
    """Add idle leading ancilla qubits (``I (x) U``); the block is unchanged."""
    extra = ancilla_count - enc.ancilla_count
    if extra < 0:
        raise ValueError("cannot remove ancillas")
    if extra == 0:
        return enc
    u = np.kron(np.eye(2**extra), enc.unitary)
    return BlockEncoding(u, ancilla_count, enc.system_dim, enc.alpha, enc.epsilon, enc.query_cost)


def product(first, second):
    """Encoding of ``B1 @ B2`` with ancilla registers side by side."""
    n = first.system_dim
    if second.system_dim != n:
        raise ValueError(f"system dimension mismatch: {n} vs {second.system_dim}")
    d1, d2 = 2**first.ancilla_count, 2**second.ancilla_count
    # layout (anc2, anc1, sys)
    x = np.kron(np.eye(d2), first.unitary)
    y = _permute_registers(np.kron(np.eye(d1), second.unitary), (d1, d2, n), (1, 0, 2))
    return BlockEncoding(
        x @ y,
        first.ancilla_count + second.ancilla_count,
        n,
        first.alpha * second.alpha,
        first.epsilon + second.epsilon,
        first.query_cost + second.query_cost,
    )


def tensor(first, second):
    """Encoding of ``B1 (x) B2``."""
    d1, d2 = 2**first.ancilla_count, 2**second.ancilla_count
    n1, n2 = first.system_dim, second.system_dim
    # kron gives layout (anc1, sys1, anc2, sys2)
    u = _permute_registers(np.kron(first.unitary, second.unitary), (d1, n1, d2, n2), (0, 2, 1, 3))
    return BlockEncoding(
        u,
        first.ancilla_count + second.ancilla_count,
        n1 * n2,
        first.alpha * second.alpha,
        first.epsilon + second.epsilon,
        first.query_cost + second.query_cost,
    )


def state_prep_unitary(vec):
    """Some unitary ``V`` with ``V|0> = vec`` (unit norm)."""
    v = np.asarray(vec, dtype=complex).ravel()
    n = v.size
    m = np.eye(n, dtype=complex)
    m[:, 0] = v
    q, r = np.linalg.qr(m)
    q[:, 0] *= r[0, 0]
    return q


def linear_combination(encs, coeffs):
    """Encoding of ``sum_i y_i B_i / ||y||_1`` (PREP-SELECT-PREP^dagger).

    All encodings are padded to a common ancilla count, and
    ``ceil(log2 m)`` selector qubits are added in front.
    """
    encs = list(encs)
    if not encs:
        raise ValueError("empty list of encodings")
    y = np.asarray(coeffs, dtype=float).ravel()
    if y.size != len(encs):
        raise ValueError(f"{len(encs)} encodings but {y.size} coefficients")
    l1 = float(np.sum(np.abs(y)))
    if l1 == 0:
        raise ValueError("coefficient vector must be nonzero")
    n = encs[0].system_dim
    if any(e.system_dim != n for e in encs):
        raise ValueError("system dimension mismatch")
    amax = max(e.ancilla_count for e in encs)
    encs = [pad_ancillas(e, amax) for e in encs]
    sel_qubits = math.ceil(math.log2(len(encs))) if len(encs) > 1 else 0
    m_pad = 2**sel_qubits
    dim = encs[0].dim
    weights = np.zeros(m_pad)
    weights[: len(encs)] = np.abs(y) / l1
    prep = state_prep_unitary(np.sqrt(weights))
    blocks = np.empty((m_pad, dim, dim), dtype=complex)
    for k in range(m_pad):
        if k < len(encs):
            blocks[k] = (-1.0 if y[k] < 0 else 1.0) * encs[k].unitary
        else:
            blocks[k] = np.eye(dim)
    # (PREP^dagger (x) I) SELECT (PREP (x) I)
    u = np.einsum("ki,kxz,kj->ixjz", prep.conj(), blocks, prep).reshape(m_pad * dim, m_pad * dim)
    return BlockEncoding(
        u,
        amax + sel_qubits,
        n,
        alpha=l1,
        epsilon=float(np.sum(np.abs(y) * [e.epsilon for e in encs]) / l1),
        query_cost=sum(e.query_cost for e in encs),
    )


def scale(enc, p):
    """Encoding of ``B / p`` for ``p > 1``: ``(R_Y(theta) (x) I)`` times ``U``."""
    if not p > 1:
        raise ValueError(f"scale factor must exceed 1, got {p}")
    theta = 2 * math.acos(1 / p)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    ry = np.array([[c, -s], [s, c]], dtype=complex)
    rot = BlockEncoding(np.kron(ry, np.eye(enc.system_dim)), 1, enc.system_dim, alpha=p)
    return product(rot, enc)


def diagonal_from_state(psi):
    """Exact encoding of ``diag(psi_0, ..., psi_{N-1})``."""
    if not isinstance(psi, StatePrep):
        psi = StatePrep(psi)
    return encode_contraction(np.diag(psi.amplitudes), query_cost=1)


def density_from_state_prep(prep, dims, traced, query_cost=0):
    """Exact encoding of ``rho = Tr_traced |Phi><Phi|`` with ``|Phi> = prep|0...0>``.

    Realized as ``(U^dagger (x) I) SWAP_{B,B'} (U (x) I)``: the ancilla
    register is the whole prepared system, the encoded system is a fresh
    copy ``B'`` of the kept subsystems.

    Parameters
    ----------
    prep : ndarray
        Unitary on the joint register with subsystem sizes ``dims``.
    dims : sequence of int
        Subsystem dimensions (powers of two), most significant first.
    traced : sequence of int
        Indices of the subsystems traced out.
    query_cost : int
        Cost of one use of ``prep``; the encoding uses it twice.
    """
    dims = tuple(int(d) for d in dims)
    traced = sorted(set(int(t) for t in traced))
    if any(t < 0 or t >= len(dims) for t in traced) or len(traced) == len(dims):
        raise ValueError(f"invalid subsystem split {traced} of {dims}")
    if any(not is_power_of_two(d) for d in dims):
        raise ValueError(f"subsystem dims {dims} must be powers of two")
    u = np.asarray(prep, dtype=complex)
    total = int(np.prod(dims))
    if u.shape != (total, total):
        raise ValueError(f"prep shape {u.shape} does not match dims {dims}")
    if _unitarity_defect(u) > tolerance():
        raise ValueError("prep is not unitary")
    kept = [i for i in range(len(dims)) if i not in traced]
    perm = traced + kept
    if perm != list(range(len(dims))):
        # permute output registers only; the input |0...0> is invariant
        k = len(dims)
        p = np.eye(total).reshape(dims + dims).transpose(tuple(perm) + tuple(range(k, 2 * k)))
        u = p.reshape(total, total) @ u
    d_a = int(np.prod([dims[i] for i in traced])) if traced else 1
    d_b = total // d_a
    u4 = u.reshape(d_a, d_b, total)
    w = np.einsum("aer,afc->rfce", u4.conj(), u4).reshape(total * d_b, total * d_b)
    return BlockEncoding(w, _log2(total), d_b, query_cost=2 * query_cost)


def amplification_queries(gamma, delta, eps):
    """Uses of ``U`` charged by uniform singular value amplification."""
    return math.ceil((gamma / delta) * math.log(gamma / eps))


def amplify(enc, gamma, delta=0.5, eps=1e-10, perturbation=0.0):
    """Uniform singular value amplification by ``gamma``.

    Requires every singular value of the block to be at most
    ``(1 - delta) / gamma``.  The result encodes ``gamma * B`` with the same
    singular vectors; a nonzero ``perturbation`` (``|perturbation| <= eps``)
    multiplies each amplified singular value by ``1 + perturbation``.
    """
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    if not 0 < delta < 0.5 + 1e-15:
        raise ValueError(f"delta must lie in (0, 1/2], got {delta}")
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    if abs(perturbation) > eps:
        raise ValueError("perturbation exceeds eps")
    b = enc.block
    w, sv, vh = np.linalg.svd(b)
    threshold = (1 - delta) / gamma
    bad = np.nonzero(sv > threshold + tolerance())[0]
    if bad.size:
        raise ValueError(
            f"singular value {sv[bad[0]]:.12g} exceeds amplification threshold {threshold:.12g}"
        )
    if perturbation == 0.0:
        new = gamma * b
    else:
        new = (w * (gamma * sv * (1 + perturbation))) @ vh
    m = amplification_queries(gamma, delta, eps)
    return encode_contraction(
        new,
        alpha=enc.alpha / gamma,
        epsilon=gamma * enc.epsilon + eps * (1 - delta),
        query_cost=m * max(enc.query_cost, 1),
    )


def apply_to_state(enc, phi):
    """Return the joint state ``U (|0>_a (x) |phi>)``."""
    vec = phi.amplitudes if isinstance(phi, StatePrep) else np.asarray(phi, dtype=complex)
    if vec.size != enc.system_dim:
        raise ValueError(f"state dimension {vec.size} != system_dim {enc.system_dim}")
    # |0>_a (x) phi occupies the first system_dim entries
    return enc.unitary[:, : enc.system_dim] @ vec


def dump_unitary_csv(enc, path):
    """Write the unitary as CSV, each entry as a ``re,im`` pair."""
    u = enc.unitary
    out = np.empty((u.shape[0], 2 * u.shape[1]))
    out[:, 0::2] = u.real
    out[:, 1::2] = u.imag
    np.savetxt(path, out, delimiter=",", fmt="%.17g")
