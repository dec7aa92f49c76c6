"""scikit-learn style wrappers around the functional API."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from qsvtkit.blockenc import SparseHermitian, encode_contraction
from qsvtkit.powermethod import PowerMethodConfig, boosted_state_prep, estimate_lambda_max
from qsvtkit.qsvt import ChebyshevSeries, apply_svt


def _square_matrix(X):
    mat = np.asarray(X)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if mat.size == 0:
        raise ValueError("empty matrix")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix contains NaN or infinity")
    return mat.astype(complex)


class QuantumPowerMethod(BaseEstimator):
    """Dominant eigenvalue of a sparse Hermitian matrix.

    ``fit(A)`` runs the boosted power method and stores ``lambda_max_``,
    ``eigenvector_`` (the normalized power iterate) and the full
    ``result_``.
    """

    def __init__(self, k=None, beta=0.01, eps=1e-2, eps_poly=1e-6, mode="exact", seed=0,
                 shots=None, sparsity=None, kappa=None):
        self.k = k
        self.beta = beta
        self.eps = eps
        self.eps_poly = eps_poly
        self.mode = mode
        self.seed = seed
        self.shots = shots
        self.sparsity = sparsity
        self.kappa = kappa

    def _config(self):
        return PowerMethodConfig(self.k, self.beta, self.eps, self.eps_poly, self.mode, self.seed, self.shots)

    def fit(self, X, y=None):
        mat = X if isinstance(X, SparseHermitian) else SparseHermitian.from_dense(
            _square_matrix(X), sparsity=self.sparsity, kappa=self.kappa
        )
        config = self._config()
        self.result_ = estimate_lambda_max(mat, config)
        state = boosted_state_prep(mat, config).state.amplitudes
        self.eigenvector_ = state[: mat.orig_dim]
        self.lambda_max_ = self.result_.lambda_est
        self.n_features_in_ = mat.orig_dim
        return self


class PolynomialSVTransformer(TransformerMixin, BaseEstimator):
    """Apply a Chebyshev polynomial to a contraction through singular value transformation.

    ``transform(X)`` returns ``P(X)``: eigenvalue transform for Hermitian
    ``X``, singular value transform otherwise.
    """

    def __init__(self, coeffs=(0.0, 1.0)):
        self.coeffs = coeffs

    def fit(self, X=None, y=None):
        self.poly_ = ChebyshevSeries.from_coeffs(np.asarray(self.coeffs, dtype=float))
        return self

    def transform(self, X):
        check_is_fitted(self, "poly_")
        mat = _square_matrix(X)
        out, self.report_ = apply_svt(encode_contraction(mat), self.poly_)
        return out.block
