"""Command-line front end: ``qsvtkit <subcommand> ...``.

Exit codes: 0 success, 1 acceptance failure (result disagrees with the
classical oracle), 2 validation or I/O error.
"""

import argparse
import csv
import io
import json
import math
from importlib import resources
from pathlib import Path
import sys

import jsonschema
import numpy as np

from qsvtkit import blockenc as be
from qsvtkit._config import tolerance
from qsvtkit.integrate import (
    ComputableFunction,
    GridSpec,
    ImportanceSamplingPlan,
    MultivariatePolynomial,
    gauss_chebyshev_integrate,
    general_function_integrate,
    mc_importance_integrate,
    mc_uniform_integrate,
    rect_integrate,
)
from qsvtkit.matrix_io import MatrixFormatError, load_matrix
from qsvtkit.powermethod import PowerMethodConfig, estimate_lambda_max, power_iterate
from qsvtkit.qsvt import cos_poly, exp_poly, sup_error

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2
EXACT_INTEGRAL_TOL = 1e-8


class UsageError(Exception):
    """Bad input: maps to exit code 2."""


def _schema(name):
    text = resources.files("qsvtkit").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def _emit(report, schema, out):
    jsonschema.validate(report, _schema(schema))
    text = json.dumps(report, indent=2, default=float)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _check_eps(eps):
    if not 0 < eps < 0.5:
        raise UsageError(f"eps must lie in (0, 1/2), got {eps}")


# ---------------------------------------------------------------- power-method


def run_power_method(args):
    cfg = _read_json(args.config) if args.config else {}
    for key in ("matrix", "k", "beta", "eps", "mode", "seed", "shots"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    if "matrix" not in cfg:
        raise UsageError("no matrix given (--matrix or config 'matrix')")
    eps = float(cfg.get("eps", 1e-2))
    _check_eps(eps)
    mat = load_matrix(cfg["matrix"])
    config = PowerMethodConfig(
        k=cfg.get("k"),
        beta=float(cfg.get("beta", 0.01)),
        eps=eps,
        mode=cfg.get("mode", "exact"),
        seed=int(cfg.get("seed", 0)),
        shots=cfg.get("shots"),
    )
    result = estimate_lambda_max(mat, config)
    evals = mat.eigvalsh()
    direct = float(evals[np.argmax(np.abs(evals))])
    xk, _, _ = power_iterate(mat, result.k)
    xk = xk / np.linalg.norm(xk)
    rayleigh = float(np.vdot(xk, mat.to_dense() @ xk).real)
    tol = 2 * eps
    passed = abs(result.lambda_est - direct) <= tol
    report = dict(result.to_dict(), lambda_direct=direct, lambda_power_iterate=rayleigh,
                  abs_error=abs(result.lambda_est - direct), tolerance=tol, passed=passed,
                  n=mat.orig_dim, sparsity=mat.sparsity, kappa=mat.kappa)
    _emit(report, "power_method_report", args.out)
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------- integrate

_SAFE_NAMES = {name: getattr(math, name) for name in dir(math) if not name.startswith("_")}


def _expression(text, dim):
    """Compile an expression in ``x`` (``x, y, z`` for d <= 3) using :mod:`math` names."""
    names = ["x", "y", "z"][:dim] if dim <= 3 else [f"x{i}" for i in range(dim)]
    try:
        code = compile(text, "<expr>", "eval")
    except SyntaxError as exc:
        raise UsageError(f"bad expression {text!r}: {exc}") from exc
    bad = [n for n in code.co_names if n not in _SAFE_NAMES and n not in names]
    if bad:
        raise UsageError(f"unknown names in expression: {bad}")

    def fn(*coords):
        return eval(code, {"__builtins__": {}}, dict(_SAFE_NAMES, **dict(zip(names, coords))))

    return fn


def _box_integral(poly, domain):
    total = 0.0
    for c, exps in poly.terms:
        total += c * np.prod([(b ** (e + 1) - a ** (e + 1)) / (e + 1) for (a, b), e in zip(domain, exps)])
    return float(total)


def _chebyshev_weight_integral(poly):
    # int x^e / sqrt(1 - x^2) over (-1, 1) = pi * C(e, e/2) / 2^e for even e
    return float(sum(c * (math.pi * math.comb(e[0], e[0] // 2) / 2 ** e[0] if e[0] % 2 == 0 else 0.0)
                     for c, e in poly.terms))


def _request(args):
    req = _read_json(args.request) if args.request else {}
    grid = req.get("grid", {})
    merged = {
        "method": args.method or req.get("method"),
        "poly": args.poly or req.get("poly"),
        "expr": args.expr or req.get("expr"),
        "density": args.density or req.get("density", "1"),
        "grid_n": args.grid_n or grid.get("n"),
        "dim": args.dim or grid.get("dim", 1),
        "domain": grid.get("domain"),
        "samples": args.samples or req.get("samples", 64),
        "nodes": args.nodes or req.get("nodes"),
        "mode": args.mode or req.get("mode", "exact"),
        "seed": args.seed if args.seed is not None else req.get("seed", 0),
        "shots": args.shots or req.get("shots"),
        "eps": args.eps or req.get("eps", 1e-2),
    }
    if merged["method"] not in ("rect", "mc", "importance", "quad", "general"):
        raise UsageError(f"unknown or missing method {merged['method']!r}")
    _check_eps(float(merged["eps"]))
    return merged


def _load_poly(req):
    src = req["poly"]
    if src is None:
        raise UsageError("this method needs --poly")
    doc = src if isinstance(src, dict) else _read_json(src)
    try:
        return MultivariatePolynomial.from_json(doc)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def run_integrate(args):
    req = _request(args)
    method, mode, seed, shots, eps = req["method"], req["mode"], int(req["seed"]), req["shots"], float(req["eps"])
    analytic = None
    if method == "rect":
        poly = _load_poly(req)
        if not req["grid_n"]:
            raise UsageError("rect needs --grid-n")
        grid = GridSpec(poly.dim, int(req["grid_n"]), req["domain"])
        result = rect_integrate(poly, grid, mode, shots, seed, eps)
        analytic = _box_integral(poly, grid.domain)
    elif method == "mc":
        poly = _load_poly(req)
        domain = req["domain"] or [(-0.5, 0.5)] * poly.dim
        result = mc_uniform_integrate(poly, int(req["samples"]), seed, mode, shots, domain, eps)
        analytic = _box_integral(poly, domain)
    elif method == "importance":
        poly = _load_poly(req)
        plan = ImportanceSamplingPlan.draw(_expression(req["density"], poly.dim), int(req["samples"]), seed, poly.dim)
        result = mc_importance_integrate(poly, plan, mode, shots, seed, eps)
        analytic = _box_integral(poly, [(-0.5, 0.5)] * poly.dim)
    elif method == "quad":
        poly = _load_poly(req)
        n = req["nodes"] or req["grid_n"]
        if not n:
            raise UsageError("quad needs --nodes")
        result = gauss_chebyshev_integrate(poly, int(n), mode=mode, shots=shots, seed=seed, read_eps=eps)
        analytic = _chebyshev_weight_integral(poly)
    else:
        if not req["expr"] or not req["grid_n"]:
            raise UsageError("general needs --expr and --grid-n")
        dim = int(req["dim"])
        func = ComputableFunction(_expression(req["expr"], dim), dim)
        result = general_function_integrate(func, GridSpec(dim, int(req["grid_n"])), mode, shots, seed, eps)
    if args.dump:
        _dump_points(result, args.dump)
    gap = abs(result.value - result.reference)
    tol = EXACT_INTEGRAL_TOL if mode == "exact" else 2 * eps
    report = dict(result.to_dict(), analytic=analytic, oracle_gap=gap, tolerance=tol, passed=gap <= tol)
    _emit(report, "integrate_report", args.out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _dump_points(result, path):
    pts = np.atleast_2d(np.asarray(result.points, dtype=float))
    pts = pts.reshape(len(result.diagonal), -1)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(pts.shape[1])] + ["loaded_value"])
        for row, val in zip(pts, result.diagonal):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(val))])


# ---------------------------------------------------------------- blockenc-verify


def _verify_checks(mat, tol):
    a = mat.to_dense() / mat.sparsity
    n = mat.dim
    enc = be.encode_sparse_hermitian(mat)
    rng = np.random.default_rng(0)
    other = be.encode_contraction(np.diag(rng.uniform(-1, 1, n)))
    checks = {}

    def record(name, err):
        checks[name] = {"error": float(err), "passed": bool(err <= tol)}

    record("unitarity", np.max(np.abs(enc.unitary.conj().T @ enc.unitary - np.eye(enc.dim))))
    record("block_equals_A_over_s", np.max(np.abs(enc.block - a)))
    record("product", np.max(np.abs(be.product(enc, other).block - a @ other.block)))
    record("tensor", np.max(np.abs(be.tensor(enc, be.identity_encoding(2)).block - np.kron(a, np.eye(2)))))
    lcu = be.linear_combination([enc, other], [0.75, -0.25])
    record("linear_combination", np.max(np.abs(lcu.block - (0.75 * a - 0.25 * other.block))))
    record("scale", np.max(np.abs(be.scale(enc, 3.0).block - a / 3)))
    psi = be.StatePrep.uniform(n)
    dens = be.density_from_state_prep(be.state_prep_unitary(psi.amplitudes), (n,), traced=[])
    record("density_of_pure_state", np.max(np.abs(dens.block - np.outer(psi.amplitudes, psi.amplitudes.conj()))))
    top = np.linalg.norm(a, 2)
    if top > 0:
        amp = be.amplify(be.encode_contraction(a * 0.25 / top), 2.0, delta=0.5)
        record("amplify", np.max(np.abs(amp.block - a * 0.5 / top)))
    record("compress", np.max(np.abs(be.compress(lcu).block - lcu.block)))
    return checks


def run_blockenc_verify(args):
    mat = load_matrix(args.matrix)
    tol = tolerance() if args.tol is None else args.tol
    checks = _verify_checks(mat, max(tol, 1e-10))
    for name, res in checks.items():
        print(f"{'PASS' if res['passed'] else 'FAIL'} {name} (error {res['error']:.3e})", file=sys.stderr)
    passed = all(r["passed"] for r in checks.values())
    report = {"matrix": str(args.matrix), "n": mat.orig_dim, "sparsity": mat.sparsity,
              "checks": checks, "passed": passed}
    _emit(report, "blockenc_verify_report", args.out)
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------- poly-approx


def _parse_sweep(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --eps-sweep {text!r}") from exc
    if not values:
        raise UsageError("empty --eps-sweep")
    for eps in values:
        if not 0 < eps <= 0.5:
            raise UsageError(f"eps must lie in (0, 1/2], got {eps}")
    return values


def run_poly_approx(args):
    sweep = _parse_sweep(args.eps_sweep)
    if args.kind == "exp":
        param = 0.01 if args.param is None else args.param
        build = lambda e: exp_poly(param, e)  # noqa: E731
        target = lambda x: 0.5 * np.exp(-param * (1 - x))  # noqa: E731
    else:
        param = 2 * math.pi if args.param is None else args.param
        build = lambda e: cos_poly(param, e)  # noqa: E731
        target = lambda x: np.cos(param * x)  # noqa: E731
    rows = []
    for eps in sweep:
        poly = build(eps)
        err = sup_error(poly, target)
        rows.append({"eps": eps, "degree": poly.degree, "sup_error": err,
                     "value_at_minus_one": float(poly(-1.0)), "passed": err <= eps})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if args.report:
        _emit({"kind": args.kind, "param": param, "rows": rows}, "poly_approx_report", args.report)
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_FAIL


# ---------------------------------------------------------------- entry point


def build_parser():
    parser = argparse.ArgumentParser(prog="qsvtkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    pm = sub.add_parser("power-method", help="estimate the dominant eigenvalue of a sparse Hermitian matrix")
    pm.add_argument("--matrix", help="Matrix Market (.mtx) or JSON matrix file")
    pm.add_argument("--config", help="JSON config with matrix, k, beta, eps, mode, seed, shots")
    pm.add_argument("--k", type=int)
    pm.add_argument("--beta", type=float)
    pm.add_argument("--eps", type=float)
    pm.add_argument("--mode", choices=["exact", "sampled"])
    pm.add_argument("--seed", type=int)
    pm.add_argument("--shots", type=int)
    pm.add_argument("--out")
    pm.set_defaults(func=run_power_method)

    it = sub.add_parser("integrate", help="numerical integration")
    it.add_argument("--method", choices=["rect", "mc", "importance", "quad", "general"])
    it.add_argument("--request", help="JSON integration request")
    it.add_argument("--poly", help="polynomial JSON file")
    it.add_argument("--expr", help="integrand expression for --method general (variables x, y, z)")
    it.add_argument("--density", help="importance density expression, bounded by 1 (default 1)")
    it.add_argument("--grid-n", type=int)
    it.add_argument("--dim", type=int)
    it.add_argument("--samples", type=int)
    it.add_argument("--nodes", type=int)
    it.add_argument("--mode", choices=["exact", "sampled"])
    it.add_argument("--seed", type=int)
    it.add_argument("--shots", type=int)
    it.add_argument("--eps", type=float)
    it.add_argument("--dump", help="CSV of per-point loaded values")
    it.add_argument("--out")
    it.set_defaults(func=run_integrate)

    bv = sub.add_parser("blockenc-verify", help="check block-encoding identities on a matrix")
    bv.add_argument("--matrix", required=True)
    bv.add_argument("--tol", type=float)
    bv.add_argument("--out")
    bv.set_defaults(func=run_blockenc_verify)

    pa = sub.add_parser("poly-approx", help="degree and sup error of the polynomial approximations")
    pa.add_argument("--kind", choices=["exp", "cos"], required=True)
    pa.add_argument("--param", type=float, help="beta for exp (default 0.01), t for cos (default 2 pi)")
    pa.add_argument("--eps-sweep", default="1e-2,1e-4,1e-6,1e-8")
    pa.add_argument("--out", help="CSV output (default stdout)")
    pa.add_argument("--report", help="also write a JSON report here")
    pa.set_defaults(func=run_poly_approx)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, MatrixFormatError, ValueError, OSError) as exc:
        print(f"qsvtkit: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
