"""Random test matrices with controlled spectrum and sparsity."""

import numpy as np
from scipy.stats import unitary_group

from qsvtkit._config import make_rng
from qsvtkit.blockenc import SparseHermitian


def random_hermitian(n, seed=None, kappa=4.0, positive=True, spectrum=None):
    """Dense Hermitian matrix with eigenvalue magnitudes in ``[1/kappa, 1]``.

    The largest magnitude is pinned to 1 and the smallest to ``1/kappa``;
    the rest are uniform in between.  With ``positive=False`` signs are
    random.  The eigenbasis is Haar random.
    """
    rng = make_rng(seed)
    if spectrum is None:
        mags = rng.uniform(1 / kappa, 1.0, size=n)
        mags[0] = 1.0
        if n > 1:
            mags[1] = 1 / kappa
        signs = np.ones(n) if positive else rng.choice([-1.0, 1.0], size=n)
        spectrum = mags * signs
    spectrum = np.asarray(spectrum, dtype=float)
    q = unitary_group.rvs(n, random_state=rng) if n > 1 else np.ones((1, 1))
    mat = (q * spectrum) @ q.conj().T
    return (mat + mat.conj().T) / 2


def random_sparse_hermitian(n, sparsity=3, seed=None, kappa=4.0, min_gap=0.0, complex_entries=False,
                            max_tries=1000):
    """Random ``s``-sparse positive definite matrix with spectrum in ``[1/kappa, 1]``.

    A random symmetric sparsity pattern (at most ``sparsity`` nonzeros per
    row, diagonal included) is filled with Gaussian entries, then mapped
    affinely so the extreme eigenvalues are exactly ``1/kappa`` and ``1``.
    Draws are rejected until the top spectral gap is at least ``min_gap``.
    """
    rng = make_rng(seed)
    for _ in range(max_tries):
        mat = np.diag(rng.standard_normal(n)).astype(complex)
        counts = np.ones(n, dtype=int)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for idx in rng.permutation(len(pairs)):
            i, j = pairs[idx]
            if counts[i] < sparsity and counts[j] < sparsity:
                v = rng.standard_normal()
                if complex_entries:
                    v = v + 1j * rng.standard_normal()
                mat[i, j], mat[j, i] = v, np.conj(v)
                counts[i] += 1
                counts[j] += 1
        evals = np.linalg.eigvalsh(mat)
        spread = evals[-1] - evals[0]
        if spread <= 1e-12:
            continue
        a = (1 - 1 / kappa) / spread
        b = 1 - a * evals[-1]
        mapped = a * mat + b * np.eye(n)
        new = a * evals + b
        if n > 1 and new[-1] - new[-2] < min_gap:
            continue
        if np.count_nonzero(np.abs(np.diag(mapped)) < 1e-14):
            continue
        return SparseHermitian.from_dense(mapped, sparsity=sparsity, kappa=kappa)
    raise RuntimeError("could not draw a matrix meeting the gap requirement")
