"""Dense simulation of block encodings and singular value transformation.

Subpackages: :mod:`~qsvtkit.blockenc` (encodings and their algebra),
:mod:`~qsvtkit.qsvt` (Chebyshev polynomials and the transform),
:mod:`~qsvtkit.powermethod`, :mod:`~qsvtkit.integrate`,
:mod:`~qsvtkit.estimate` and the ``qsvtkit`` command line.
"""

from qsvtkit.blockenc import BlockEncoding, SparseHermitian, StatePrep
from qsvtkit.estimators import PolynomialSVTransformer, QuantumPowerMethod
from qsvtkit.integrate import GridSpec, MultivariatePolynomial
from qsvtkit.powermethod import PowerMethodConfig, estimate_lambda_max
from qsvtkit.qsvt import ChebyshevSeries, apply_svt

__version__ = "0.1.0"

__all__ = [
    "BlockEncoding",
    "ChebyshevSeries",
    "GridSpec",
    "MultivariatePolynomial",
    "PolynomialSVTransformer",
    "PowerMethodConfig",
    "QuantumPowerMethod",
    "SparseHermitian",
    "StatePrep",
    "apply_svt",
    "estimate_lambda_max",
]
