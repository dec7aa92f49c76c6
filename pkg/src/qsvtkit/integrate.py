"""Numerical integration with diagonal block encodings.

Every method here ends the same way: a diagonal encoding whose entries are
(scaled) integrand values is sandwiched between Hadamard layers, and the
``<0|H D H|0>`` amplitude, which equals the mean of the diagonal, is read
out.  The methods differ in how the diagonal is loaded:

* rectangular rule: grid variables from a rotation + amplification, then
  polynomials through monomial transforms and a linear combination;
* Monte Carlo: sample coordinates amplitude-encoded and amplified back;
* importance sampling: as above, times ``diag(Gamma_i)`` with
  ``Gamma_i`` proportional to ``1/g(x_i)``;
* Gauss-Chebyshev: the rotation loads ``(2i+1)/(4n)``, a cosine transform
  turns that into the nodes;
* general bounded functions: the rotation loads ``f(j/N)`` directly.

Registers whose size is not a power of two are padded; padded entries are
zeroed with a mask encoding before the readout.
"""

from dataclasses import dataclass, field
import itertools
import json
import math

import numpy as np
from scipy.linalg import hadamard
from scipy.special import comb

from qsvtkit._config import make_rng, spawn_rngs
from qsvtkit.blockenc import (
    StatePrep,
    amplify,
    compress,
    diagonal_from_state,
    encode_contraction,
    identity_encoding,
    is_power_of_two,
    linear_combination,
    next_power_of_two,
    product,
    scale,
    tensor,
)
from qsvtkit.estimate import MODES, EstimationResult, exact_amplitude, hadamard_test, hoeffding_shots
from qsvtkit.qsvt import apply_svt, cos_poly, monomial_poly

__all__ = [
    "ComputableFunction",
    "GridSpec",
    "ImportanceSamplingPlan",
    "IntegralResult",
    "MultivariatePolynomial",
    "QuadratureRule",
    "gauss_chebyshev_integrate",
    "general_function_integrate",
    "grid_variable_encoding",
    "hadamard_mean",
    "linear_loading",
    "mc_importance_integrate",
    "mc_uniform_integrate",
    "poly_on_grid",
    "poly_on_points",
    "rect_integrate",
    "rescale_polynomial",
]

_ENTRY_TOL = 1e-12
DEFAULT_EPS = 1e-2


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class GridSpec:
    """``N`` left-endpoint points per axis on a box, ``N^d`` in total."""

    dim: int
    points_per_axis: int
    domain: tuple = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not is_power_of_two(self.points_per_axis):
            raise ValueError(f"points_per_axis must be a power of two, got {self.points_per_axis}")
        dom = self.domain if self.domain is not None else [(-0.5, 0.5)] * self.dim
        dom = tuple((float(a), float(b)) for a, b in dom)
        if len(dom) != self.dim:
            raise ValueError(f"domain has {len(dom)} axes, expected {self.dim}")
        if any(b <= a for a, b in dom):
            raise ValueError("each domain interval must have positive length")
        object.__setattr__(self, "domain", dom)

    @property
    def total_points(self):
        return self.points_per_axis**self.dim

    @property
    def volume(self):
        return float(np.prod([b - a for a, b in self.domain]))

    def axis_points(self, axis):
        a, b = self.domain[axis]
        return a + (b - a) * np.arange(self.points_per_axis) / self.points_per_axis

    def points(self):
        """All grid points, shape ``(M, d)``, first axis most significant."""
        axes = [self.axis_points(i) for i in range(self.dim)]
        return np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, self.dim)


@dataclass(frozen=True)
class MultivariatePolynomial:
    """``sum_t c_t prod_i x_i^{e_ti}`` on ``dim`` variables."""

    dim: int
    terms: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        terms = []
        for coeff, exps in self.terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.dim:
                raise ValueError(f"exponent vector {exps} has length != {self.dim}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            terms.append((float(coeff), exps))
        if not terms:
            raise ValueError("polynomial needs at least one term")
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def from_dict(cls, mapping, dim=None):
        """Build from ``{exps: coeff}`` merging duplicates; drops zero coefficients."""
        dim = dim or len(next(iter(mapping)))
        terms = [(c, e) for e, c in mapping.items() if c != 0]
        return cls(dim, tuple(terms) or ((0.0, (0,) * dim),))

    @classmethod
    def univariate(cls, coeffs):
        """``sum_k coeffs[k] x^k``."""
        terms = [(c, (k,)) for k, c in enumerate(coeffs) if c != 0]
        return cls(1, tuple(terms) or ((0.0, (0,)),))

    @property
    def degree(self):
        return max(sum(e) for _, e in self.terms)

    @property
    def term_count(self):
        return len(self.terms)

    @property
    def coeff_l1(self):
        return float(sum(abs(c) for c, _ in self.terms))

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        if self.dim == 1 and pts.ndim <= 1:
            pts = pts.reshape(-1, 1)
        pts = np.atleast_2d(pts)
        out = np.zeros(pts.shape[0])
        for c, exps in self.terms:
            out += c * np.prod(pts ** np.array(exps), axis=1)
        return out

    def to_json(self):
        return {"dim": self.dim, "terms": [{"coeff": c, "exps": list(e)} for c, e in self.terms]}

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        try:
            terms = tuple((t["coeff"], t["exps"]) if isinstance(t, dict) else (t[0], t[1]) for t in doc["terms"])
            return cls(int(doc["dim"]), terms)
        except (KeyError, TypeError, IndexError) as exc:
            raise ValueError(f"malformed polynomial document: {exc}") from exc


@dataclass(frozen=True, eq=False)
class ComputableFunction:
    """Classical evaluator with ``|f| <= 1/2`` on ``[0, 1]^dim``.

    The bound is spot-checked on a ``17^dim`` grid at construction and
    checked again on every grid actually used.
    """

    evaluator: object
    dim: int = 1
    cost_hint: int = 1

    def __post_init__(self):
        probe = np.array(list(itertools.product(np.linspace(0, 1, 17), repeat=self.dim)))
        vals = self(probe)
        if np.max(np.abs(vals)) > 0.5 + _ENTRY_TOL:
            raise ValueError(f"|f| reaches {np.max(np.abs(vals)):.6g} > 1/2 on the domain")

    def __call__(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.asarray([float(self.evaluator(*row)) for row in pts])


@dataclass(frozen=True)
class QuadratureRule:
    """Chebyshev-Gauss nodes ``cos((2i+1) pi / 2n)`` with weights ``pi/n``."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def nodes(self):
        i = np.arange(self.n)
        return np.cos((2 * i + 1) * np.pi / (2 * self.n))

    @property
    def weights(self):
        return np.full(self.n, np.pi / self.n)


@dataclass(frozen=True, eq=False)
class ImportanceSamplingPlan:
    """Samples drawn from density ``g`` together with the ``Gamma`` amplitudes.

    ``gamma = 1/sqrt(sum 1/g(x_i)^2)`` and ``Gamma_i = gamma / g(x_i)``,
    so ``sum Gamma_i^2 = 1``.  Samples are points of ``[-1/2, 1/2]^d``;
    ``density`` should integrate to 1 there for an unbiased estimate.
    """

    density: object
    samples: np.ndarray
    gamma: float = None
    weights: np.ndarray = None

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        x = x.reshape(-1, 1) if x.ndim == 1 else x
        g = np.array([float(self.density(*row)) for row in x])
        if np.any(g <= 0):
            raise ValueError("density must be positive at every sample")
        if np.any(g > 1 + _ENTRY_TOL):
            raise ValueError("density must not exceed 1")
        gamma = 1 / math.sqrt(float(np.sum(1 / g**2)))
        weights = gamma / g
        if abs(np.sum(weights**2) - 1) > 1e-12:
            raise ValueError("Gamma amplitudes are not normalized")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "weights", weights)

    @property
    def density_values(self):
        return self.gamma / self.weights

    @classmethod
    def draw(cls, density, count, seed=None, dim=1):
        """Rejection-sample ``count`` points from ``density`` (bounded by 1)."""
        rng = make_rng(seed)
        out = []
        while len(out) < count:
            cand = rng.uniform(-0.5, 0.5, size=(4 * count, dim))
            u = rng.uniform(0, 1, size=4 * count)
            g = np.array([float(density(*row)) for row in cand])
            out.extend(cand[u < g])
        return cls(density, np.asarray(out[:count]))


@dataclass(frozen=True)
class IntegralResult:
    value: float
    mode: str
    stderr: float = 0.0
    queries: int = 0
    shots: int = 0
    reference: float = None
    discretization: dict = field(default_factory=dict)
    points: np.ndarray = field(default=None, repr=False, compare=False)
    diagonal: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    def to_dict(self):
        return {
            "value": self.value,
            "mode": self.mode,
            "stderr": self.stderr,
            "queries": self.queries,
            "shots": self.shots,
            "reference": self.reference,
            "discretization": self.discretization,
        }


# ---------------------------------------------------------------- loaders


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def rotation_loaded_diagonal(values, eps_amp=1e-10):
    """Encoding of ``diag(values)`` for ``|values| <= 1/2``.

    A Hadamard layer over ``R`` (the register size, padded to a power of
    two) and a flag rotation prepare
    ``(1/sqrt(R)) sum_j |j>(v_j|0> + sqrt(1 - v_j^2)|1>)``; its diagonal
    encoding restricted to flag 0 is ``diag(v_j)/sqrt(R)``, which
    amplification by ``sqrt(R)`` restores.  Padded entries are 0.
    """
    values = np.asarray(values, dtype=float).ravel()
    if np.max(np.abs(values), initial=0.0) > 0.5 + _ENTRY_TOL:
        raise ValueError(f"loaded values reach {np.max(np.abs(values)):.6g} > 1/2")
    register = next_power_of_two(values.size)
    v = np.zeros(register)
    v[: values.size] = np.clip(values, -0.5, 0.5)
    psi = np.concatenate([v, np.sqrt(1 - v**2)]) / math.sqrt(register)
    enc = diagonal_from_state(StatePrep(psi)).absorb(1)
    if register == 1:
        return enc
    return amplify(enc, math.sqrt(register), delta=0.5, eps=eps_amp)


def grid_variable_encoding(N, eps=1e-10):
    """Encoding of ``(1/N) sum_j (j - N/2)|j><j|``, the grid on ``[-1/2, 1/2)``."""
    if not (is_power_of_two(N) and N >= 2):
        raise ValueError(f"N must be a power of two >= 2, got {N}")
    j = np.arange(N)
    return rotation_loaded_diagonal((2 * j - N) / (2 * N), eps)


def linear_loading(N):
    """Encoding of ``(1/C) sum_j j|j><j|`` with ``C = sqrt((2N-1)(N-1)N/6)``."""
    if not (is_power_of_two(N) and N >= 2):
        raise ValueError(f"N must be a power of two >= 2, got {N}")
    c = math.sqrt((2 * N - 1) * (N - 1) * N / 6)
    return diagonal_from_state(StatePrep(np.arange(N) / c))


def _check_diagonal_var(enc, bound=0.5):
    b = enc.block
    if np.count_nonzero(b - np.diag(np.diag(b))):
        raise ValueError("variable encodings must be diagonal")
    d = np.diag(b)
    if np.max(np.abs(d.imag)) > _ENTRY_TOL or np.max(np.abs(d.real)) > bound + _ENTRY_TOL:
        raise ValueError(f"variable entries must be real with magnitude <= {bound}")


def _monomial(var, power, cache):
    if power not in cache:
        cache[power] = compress(apply_svt(var, monomial_poly(power))[0])
    return cache[power]


def _combine(term_encs, poly):
    if poly.term_count == 1:
        c = poly.terms[0][0]
        enc = term_encs[0]
        if c < 0:
            enc = encode_contraction(-enc.block, enc.alpha, enc.epsilon, enc.query_cost)
        return enc, abs(c) if c != 0 else 1.0
    coeffs = [c for c, _ in poly.terms]
    if poly.coeff_l1 == 0:
        return term_encs[0], 1.0
    return compress(linear_combination(term_encs, coeffs)), poly.coeff_l1


def poly_on_grid(variables, poly, value_bound=0.5):
    """Diagonal encoding of ``f`` on the tensor grid of ``variables``, divided by ``S``.

    Returns ``(encoding, S)`` with ``S = ||coeffs||_1``.  Each term is
    built from monomial transforms of the axis variables, each placed on
    its own axis by tensoring with identities, multiplied together; the
    terms are then linearly combined.
    """
    variables = list(variables)
    if len(variables) != poly.dim:
        raise ValueError(f"{len(variables)} variables for a {poly.dim}-variable polynomial")
    for v in variables:
        _check_diagonal_var(v, value_bound)
    sizes = [v.system_dim for v in variables]
    caches = [{} for _ in variables]

    def on_axis(axis, enc):
        out = None
        for i, n in enumerate(sizes):
            part = enc if i == axis else identity_encoding(n)
            out = part if out is None else tensor(out, part)
        return out

    total = int(np.prod(sizes))
    term_encs = []
    for _, exps in poly.terms:
        enc = None
        for axis, e in enumerate(exps):
            if e == 0:
                continue
            factor = on_axis(axis, _monomial(variables[axis], e, caches[axis]))
            enc = factor if enc is None else compress(product(enc, factor))
        term_encs.append(enc if enc is not None else identity_encoding(total))
    return _combine(term_encs, poly)


def poly_on_points(variables, poly):
    """Like :func:`poly_on_grid` but every variable lives on one shared register.

    ``variables[i]`` holds coordinate ``i`` of each sample point, so the
    result is ``diag(f(x_j)) / S`` over samples ``j``.
    """
    variables = list(variables)
    if len(variables) != poly.dim:
        raise ValueError(f"{len(variables)} variables for a {poly.dim}-variable polynomial")
    n = variables[0].system_dim
    if any(v.system_dim != n for v in variables):
        raise ValueError("all sample variables must share a register")
    for v in variables:
        _check_diagonal_var(v)
    caches = [{} for _ in variables]
    term_encs = []
    for _, exps in poly.terms:
        enc = None
        for axis, e in enumerate(exps):
            if e == 0:
                continue
            factor = _monomial(variables[axis], e, caches[axis])
            enc = factor if enc is None else compress(product(enc, factor))
        term_encs.append(enc if enc is not None else identity_encoding(n))
    return _combine(term_encs, poly)


def rescale_polynomial(poly, domain):
    """Rewrite ``f(x)`` on ``domain`` as a polynomial in ``u`` on ``[-1/2, 1/2]^d``.

    Uses ``x_i = a_i + L_i (u_i + 1/2)``; the map is affine, so the result
    is exact.
    """
    acc = {}
    for c, exps in poly.terms:
        # expand prod_i (p_i + L_i u_i)^{e_i} with p_i = a_i + L_i/2
        per_axis = []
        for (a, b), e in zip(domain, exps):
            L = b - a
            p = a + L / 2
            per_axis.append([(comb(e, r, exact=True) * p ** (e - r) * L**r, r) for r in range(e + 1)])
        for combo in itertools.product(*per_axis):
            coeff = c * float(np.prod([w for w, _ in combo]))
            key = tuple(r for _, r in combo)
            acc[key] = acc.get(key, 0.0) + coeff
    return MultivariatePolynomial.from_dict({k: v for k, v in acc.items() if abs(v) > 1e-15} or acc, poly.dim)


def _mask(register, count):
    m = np.zeros(register)
    m[:count] = 1.0
    return encode_contraction(np.diag(m))


def hadamard_mean(enc, mode="exact", shots=None, seed=None):
    """Mean of the (real) diagonal of the block via ``<0|H D H|0>``.

    Exact mode reads the amplitude of ``|0>_a|0>`` in
    ``(I (x) H) U (I (x) H)|0>_a|0>``.  Sampled mode runs a Hadamard test on
    the uniform state, which has the same expectation.
    """
    _check_mode(mode)
    n = enc.system_dim
    if not is_power_of_two(n):
        raise ValueError("readout register must be a power of two")
    uniform = np.full(n, 1 / math.sqrt(n))
    if mode == "exact":
        h = hadamard(n) / math.sqrt(n)
        joint = enc.unitary[:, :n] @ uniform
        joint[:n] = h @ joint[:n]
        amp = exact_amplitude(joint, 0)
        return EstimationResult(amp.real, "exact", 0, 0.0, max(enc.query_cost, 1))
    return hadamard_test(enc, uniform, "sampled", shots, seed)


def _readout(enc, multiplier, mode, shots, seed, eps):
    """Hadamard-mean readout times ``multiplier``; returns (value, stderr, queries, shots)."""
    if mode == "sampled" and shots is None:
        shots = hoeffding_shots(eps / (2 * abs(multiplier)))
    est = hadamard_mean(enc, mode, shots, seed)
    return (
        float(np.real(est.value)) * multiplier,
        est.stderr * abs(multiplier),
        int(est.queries),
        int(shots or 0),
    )


def rect_integrate(poly, grid, mode="exact", shots=None, seed=None, eps=DEFAULT_EPS):
    """Rectangular rule ``volume * mean_i f(x_i)`` on the left-endpoint grid."""
    _check_mode(mode)
    if poly.dim != grid.dim:
        raise ValueError(f"{poly.dim}-variable polynomial on a {grid.dim}-d grid")
    local = rescale_polynomial(poly, grid.domain)
    var = grid_variable_encoding(grid.points_per_axis)
    enc, norm = poly_on_grid([var] * grid.dim, local)
    pts = grid.points()
    value, err, queries, shots = _readout(enc, grid.volume * norm, mode, shots, seed, eps)
    return IntegralResult(
        value,
        mode,
        err,
        queries,
        shots,
        reference=float(grid.volume * np.mean(poly(pts))),
        discretization={"method": "rect", "dim": grid.dim, "N": grid.points_per_axis,
                        "domain": [list(d) for d in grid.domain], "S": norm},
        points=pts,
        diagonal=np.diag(enc.block).real * norm,
    )


def _sample_variables(samples, register):
    """Per-coordinate encodings of the samples: normalize, encode, amplify back."""
    out = []
    for axis in range(samples.shape[1]):
        x = samples[:, axis]
        r = float(np.linalg.norm(x))
        if r == 0:
            raise ValueError("all sample coordinates are zero")
        amps = np.zeros(register)
        amps[: x.size] = x / r
        enc = diagonal_from_state(StatePrep(amps))
        out.append(amplify(enc, r, delta=0.5) if r > 1 else _shrink(enc, r))
    return out


def _shrink(enc, r):
    # amplification needs gamma > 1; a norm below 1 means scaling down
    if r == 1:
        return enc
    return encode_contraction(enc.block * r, enc.alpha, enc.epsilon, enc.query_cost)


def _uniform_samples(count, dim, rng):
    return rng.uniform(-0.5, 0.5, size=(count, dim))


def mc_uniform_integrate(poly, count, seed=None, mode="exact", shots=None, domain=None, eps=DEFAULT_EPS):
    """Monte Carlo ``|D| (1/M) sum_i f(x_i)`` with uniform samples.

    Samples are drawn on ``[-1/2, 1/2]^d`` (seeded) and mapped affinely onto
    ``domain``; ``f`` is rescaled to match, so the loaded coordinates always
    satisfy ``|x| <= 1/2``.
    """
    _check_mode(mode)
    if count < 1:
        raise ValueError("sample count must be >= 1")
    dim = poly.dim
    domain = tuple(tuple(d) for d in domain) if domain is not None else ((-0.5, 0.5),) * dim
    volume = float(np.prod([b - a for a, b in domain]))
    sample_rng, shot_rng = spawn_rngs(seed, 2)
    u = _uniform_samples(count, dim, sample_rng)
    if np.all(u == 0):
        u = _uniform_samples(count, dim, sample_rng)
        if np.all(u == 0):
            raise ValueError("degenerate all-zero sample")
    lows = np.array([a for a, _ in domain])
    lens = np.array([b - a for a, b in domain])
    points = lows + lens * (u + 0.5)
    return _mc_pipeline(
        rescale_polynomial(poly, domain), u, None, volume, mode, shots, shot_rng, eps,
        reference=float(volume * np.mean(poly(points))), points=points,
        meta={"method": "mc", "samples": count, "domain": [list(d) for d in domain]},
    )


def _mc_pipeline(local, u, plan, multiplier, mode, shots, shot_rng, eps, reference, points, meta):
    count = u.shape[0]
    register = next_power_of_two(count)
    enc, norm = poly_on_points(_sample_variables(u, register), local)
    if plan is not None:
        gam = np.zeros(register)
        gam[:count] = plan.weights
        # Gamma is zero on padded slots, so it doubles as the mask
        enc = compress(product(enc, diagonal_from_state(StatePrep(gam))))
        multiplier = multiplier / plan.gamma
    elif register != count:
        enc = compress(product(enc, _mask(register, count)))
    mult = multiplier * norm * register / count
    value, err, queries, shots = _readout(enc, mult, mode, shots, shot_rng, eps)
    return IntegralResult(
        value, mode, err, queries, shots, reference=reference, discretization=dict(meta, S=norm),
        points=points, diagonal=np.diag(enc.block).real[:count] * mult,
    )


def mc_importance_integrate(poly, plan, mode="exact", shots=None, seed=None, eps=DEFAULT_EPS):
    """Importance-sampled ``(1/M) sum_i f(x_i) / g(x_i)`` on ``[-1/2, 1/2]^d``.

    The encoded diagonal is ``gamma f(x_i)/g(x_i)`` (up to ``S``); the factor
    ``gamma`` is divided out classically rather than amplified away.
    """
    _check_mode(mode)
    u = plan.samples
    if u.shape[1] != poly.dim:
        raise ValueError("sample dimension does not match the polynomial")
    if np.max(np.abs(u)) > 0.5 + _ENTRY_TOL:
        raise ValueError("importance samples must lie in [-1/2, 1/2]^d")
    g = plan.density_values
    return _mc_pipeline(
        poly, u, plan, 1.0, mode, shots, make_rng(seed), eps,
        reference=float(np.mean(poly(u) / g)), points=u,
        meta={"method": "importance", "samples": u.shape[0], "gamma": plan.gamma},
    )


def gauss_chebyshev_integrate(poly, n, eps=1e-12, mode="exact", shots=None, seed=None, read_eps=DEFAULT_EPS):
    """``sum_i (pi/n) f(x_i)`` at the Chebyshev-Gauss nodes.

    The rotation loads ``(2i+1)/(4n)``; ``cos(2 pi x)`` (approximated to
    ``eps``) maps it to the nodes; ``f`` is applied by monomial transforms
    and a linear combination.  The weight ``pi/n`` is injected by
    :func:`~qsvtkit.blockenc.scale` when ``n > pi``; otherwise it is a
    classical factor.

    This sum is exact for ``int f(x) / sqrt(1 - x^2) dx`` over ``(-1, 1)``
    when ``deg f <= 2n - 1``.
    """
    _check_mode(mode)
    if poly.dim != 1:
        raise ValueError("Gauss-Chebyshev integration is one-dimensional")
    if n < 1:
        raise ValueError("n must be >= 1")
    register = next_power_of_two(n)
    i = np.arange(n)
    angles = rotation_loaded_diagonal((2 * i + 1) / (4 * n))
    nodes, _ = apply_svt(angles, cos_poly(2 * math.pi, eps))
    # node entries fill (-1, 1), which monomial transforms accept
    enc, norm = poly_on_grid([nodes], poly, value_bound=1.0)
    weight = math.pi / n
    if n > math.pi:
        enc = scale(enc, 1 / weight)
        classical = 1.0
    else:
        classical = weight
    if register != n:
        enc = compress(product(enc, _mask(register, n)))
    mult = norm * register * classical
    value, err, queries, shots = _readout(enc, mult, mode, shots, seed, read_eps)
    rule = QuadratureRule(n)
    return IntegralResult(
        value, mode, err, queries, shots,
        reference=float(np.sum(rule.weights * poly(rule.nodes))),
        discretization={"method": "quad", "n": n, "S": norm},
        points=rule.nodes, diagonal=np.diag(enc.block).real[:n] * mult,
    )


def general_function_integrate(func, grid, mode="exact", shots=None, seed=None, eps=DEFAULT_EPS):
    """``(1/N^d) sum_j f(j/N)`` for a bounded classical function on ``[0, 1]^d``.

    The whole grid register controls one rotation loading ``f(j/N)``, so no
    polynomial approximation is involved.
    """
    _check_mode(mode)
    if func.dim != grid.dim:
        raise ValueError(f"{func.dim}-variable function on a {grid.dim}-d grid")
    unit = GridSpec(grid.dim, grid.points_per_axis, [(0.0, 1.0)] * grid.dim)
    pts = unit.points()
    vals = func(pts)
    if np.max(np.abs(vals)) > 0.5 + _ENTRY_TOL:
        raise ValueError(f"|f| reaches {np.max(np.abs(vals)):.6g} > 1/2 on the grid")
    enc = rotation_loaded_diagonal(vals)
    value, err, queries, shots = _readout(enc, 1.0, mode, shots, seed, eps)
    return IntegralResult(
        value, mode, err, queries + func.cost_hint * (shots or 1), shots,
        reference=float(np.mean(vals)),
        discretization={"method": "general", "dim": grid.dim, "N": grid.points_per_axis},
        points=pts, diagonal=vals,
    )
