"""Chebyshev-basis polynomials and exact singular value transformation.

The transformation itself is realized with a dense eigen/singular value
decomposition of the encoded block; the error charged to the result
follows the QSVT bound ``4 d sqrt(eps/alpha)`` plus the polynomial's own
approximation error.
"""

from dataclasses import dataclass
import json
import math

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import special

from qsvtkit._config import tolerance
from qsvtkit.blockenc import encode_contraction

__all__ = [
    "ChebyshevSeries",
    "SvtReport",
    "apply_svt",
    "cos_poly",
    "evaluate",
    "exp_poly",
    "monomial_poly",
    "sup_error",
]

SUP_SAMPLES = 10_001
_PARITY_TOL = 1e-14


def _parity_of(coeffs):
    c = np.asarray(coeffs, dtype=float)
    if np.all(np.abs(c[0::2]) <= _PARITY_TOL):
        return "odd"
    if np.all(np.abs(c[1::2]) <= _PARITY_TOL):
        return "even"
    return "mixed"


def _certified_sup(coeffs):
    """max |P| on [-1, 1] from endpoints, real critical points and a dense grid."""
    c = np.asarray(coeffs, dtype=float)
    pts = [np.linspace(-1.0, 1.0, SUP_SAMPLES)]
    if c.size > 2:
        roots = C.chebroots(C.chebder(c))
        real = roots[np.abs(roots.imag) < 1e-9].real
        pts.append(real[(real >= -1) & (real <= 1)])
    return float(np.max(np.abs(C.chebval(np.concatenate(pts), c))))


@dataclass(frozen=True, eq=False)
class ChebyshevSeries:
    """Polynomial ``sum_k coeffs[k] T_k(x)`` on ``[-1, 1]``.

    ``approx_error`` is the measured sup-norm distance to the function the
    series was built to approximate (zero for exact polynomials).
    """

    coeffs: np.ndarray
    parity: str
    sup_bound: float
    approx_error: float = 0.0

    def __post_init__(self):
        c = np.trim_zeros(np.asarray(self.coeffs, dtype=float).ravel(), "b")
        if c.size == 0:
            c = np.zeros(1)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.parity not in ("even", "odd", "mixed"):
            raise ValueError(f"unknown parity {self.parity!r}")
        actual = _parity_of(c)
        if self.parity != "mixed" and actual != self.parity and not np.all(c == 0):
            raise ValueError(f"parity tag {self.parity!r} but coefficients are {actual}")
        if _certified_sup(c) > self.sup_bound + 1e-12:
            raise ValueError("sup_bound is below the measured maximum of |P|")

    @classmethod
    def from_coeffs(cls, coeffs, approx_error=0.0):
        c = np.asarray(coeffs, dtype=float)
        return cls(c, _parity_of(c), _certified_sup(c), approx_error)

    @property
    def degree(self):
        return self.coeffs.size - 1

    def __call__(self, x):
        return evaluate(self, x)

    def to_json(self):
        return {
            "coeffs": self.coeffs.tolist(),
            "parity": self.parity,
            "sup_bound": self.sup_bound,
        }

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(np.asarray(doc["coeffs"], dtype=float), doc["parity"], float(doc["sup_bound"]))


def evaluate(poly, x):
    """Clenshaw evaluation of ``poly`` at ``x`` in ``[-1, 1]``."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > 1 + 1e-12):
        raise ValueError("evaluation point outside [-1, 1]")
    out = C.chebval(np.clip(arr, -1.0, 1.0), poly.coeffs)
    return float(out) if np.ndim(out) == 0 else out


def sup_error(poly, target, samples=SUP_SAMPLES):
    """max |poly(x) - target(x)| on a uniform grid of ``samples`` points."""
    xs = np.linspace(-1.0, 1.0, samples)
    return float(np.max(np.abs(evaluate(poly, xs) - np.asarray(target(xs), dtype=float))))


def _truncate(full, target, tol_trunc):
    """Smallest prefix of ``full`` whose grid error is at most ``tol_trunc``."""
    xs = np.linspace(-1.0, 1.0, SUP_SAMPLES)
    fx = target(xs)
    partial = np.cumsum(C.chebvander(xs, full.size - 1) * full, axis=1)
    errs = np.max(np.abs(partial - fx[:, None]), axis=0)
    ok = np.nonzero(errs <= tol_trunc)[0]
    if ok.size == 0:
        raise ValueError("series could not reach the requested accuracy")
    return full[: ok[0] + 1]


def _bounded(coeffs, target, bound):
    """Rescale coefficients so that the certified sup does not exceed ``bound``."""
    sup = _certified_sup(coeffs)
    if sup > bound:
        coeffs = coeffs * (bound / sup)
        sup = bound
    draft = ChebyshevSeries(coeffs, _parity_of(coeffs), sup)
    return ChebyshevSeries(draft.coeffs, draft.parity, sup, sup_error(draft, target))


def _check_eps(eps):
    if not 0 < eps <= 0.5:
        raise ValueError(f"eps must lie in (0, 1/2], got {eps}")


def exp_poly(beta, eps):
    """Approximation of ``(1/2) exp(-beta (1 - x))`` to sup error ``eps``.

    Coefficients are ``e^{-beta} I_k(beta)`` (halved for ``k = 0``); the
    series is cut at the smallest degree with grid error ``eps/2`` and then
    rescaled, if needed, so that ``|P| <= 1/2`` on ``[-1, 1]``.
    """
    _check_eps(eps)
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")

    def target(x):
        return 0.5 * np.exp(-beta * (1 - np.asarray(x)))

    kmax = max(8, int(2 * beta + 4 * math.sqrt((beta + 1) * (math.log(1 / eps) + 1)) + 40))
    full = special.ive(np.arange(kmax + 1), beta)
    full[0] *= 0.5
    return _bounded(_truncate(full, target, eps / 2), target, 0.5)


def cos_poly(t, eps):
    """Even approximation of ``cos(t x)`` from the Jacobi-Anger expansion."""
    _check_eps(eps)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")

    def target(x):
        return np.cos(t * np.asarray(x))

    kmax = int(math.e * t + math.log(1 / eps) + 40)
    kmax += kmax % 2
    full = np.zeros(kmax + 1)
    ks = np.arange(0, kmax + 1, 2)
    full[ks] = 2 * (-1.0) ** (ks // 2) * special.jv(ks, t)
    full[0] = special.jv(0, t)
    return _bounded(_truncate(full, target, eps / 2), target, 1.0)


def monomial_poly(power):
    """``x**power`` in the Chebyshev basis (sup norm 1 on [-1, 1])."""
    if power < 0:
        raise ValueError("power must be nonnegative")
    mono = np.zeros(power + 1)
    mono[-1] = 1.0
    return ChebyshevSeries.from_coeffs(C.poly2cheb(mono))


@dataclass(frozen=True)
class SvtReport:
    input_epsilon: float
    output_epsilon: float
    degree: int
    queries: int


def _max_allowed(poly):
    # definite-parity polynomials bounded by 1 are implementable directly;
    # mixed parity needs the 1/2 bound
    return 1.0 if poly.parity in ("even", "odd") else 0.5


def apply_svt(enc, poly):
    """Apply ``poly`` to the encoded block.

    Hermitian blocks are transformed through their eigenvalues
    (``sum P(lambda) |e><e|``); other blocks through the full singular value
    decomposition ``sum P(s_i) |w_i><v_i|``, zero singular values included.

    Returns ``(encoding, SvtReport)``.
    """
    limit = _max_allowed(poly)
    if poly.sup_bound > limit + 1e-12:
        raise ValueError(
            f"{poly.parity} polynomial has sup {poly.sup_bound:.6g} > {limit} on [-1, 1]"
        )
    b = enc.block
    # relative test: tiny non-Hermitian blocks must not be symmetrized
    tol = tolerance() * np.max(np.abs(b), initial=0.0)
    if np.max(np.abs(b - b.conj().T), initial=0.0) <= tol:
        if np.count_nonzero(b - np.diag(np.diag(b))) == 0:
            new = np.diag(C.chebval(np.clip(np.diag(b).real, -1, 1), poly.coeffs)).astype(complex)
        else:
            lam, vecs = np.linalg.eigh((b + b.conj().T) / 2)
            vals = C.chebval(np.clip(lam, -1, 1), poly.coeffs)
            new = (vecs * vals) @ vecs.conj().T
    else:
        w, sv, vh = np.linalg.svd(b)
        vals = C.chebval(np.clip(sv, 0, 1), poly.coeffs)
        new = (w * vals) @ vh
    d = poly.degree
    out_eps = 4 * d * math.sqrt(enc.epsilon / enc.alpha) + poly.approx_error
    queries = d * max(enc.query_cost, 1)
    report = SvtReport(enc.epsilon, out_eps, d, queries)
    return encode_contraction(new, alpha=1.0, epsilon=out_eps, query_cost=queries), report
