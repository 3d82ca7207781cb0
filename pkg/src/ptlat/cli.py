"""Command-line front end: ``ptlat spectrum | verify | metric | ep``.

Every subcommand writes its machine-readable file(s) into the output
directory (``--out``, else ``$PTLAT_OUT_DIR``, else the working directory)
before printing a short summary.  Exit codes: 0 success, 1 usage error,
2 numerical failure, 3 verification mismatch.
"""
from __future__ import annotations

import argparse
import ast
import json
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import dieudonne, exactlin
from .errors import (
    DegenerateSpectrum,
    DepthTooLarge,
    DimensionMismatch,
    MultipleTransitions,
    NoSignChange,
    NonFinite,
    PTLatticeError,
)
from .exceptional import ParameterPath, ep_refine, sweep, symmetrizability_boundary
from .lattice import CouplingVector, build_hamiltonian, parity
from .metric import assemble_metric, charge_candidate, dyson_factor, quasi_hermiticity_residual
from .spectra import TOL_REAL

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_MISMATCH = 0, 1, 2, 3

NAMES = ("lambda", "mu", "nu")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------- parsing

def _param_index(name: str) -> int:
    """0-based coupling index of ``lambda``/``mu``/``nu`` or ``p<d>``."""
    if name in NAMES:
        return NAMES.index(name)
    if name.startswith("p") and name[1:].isdigit() and int(name[1:]) >= 1:
        return int(name[1:]) - 1
    raise UsageError(f"unknown parameter name {name!r}")


def _number(text: str) -> Fraction:
    try:
        return exactlin.parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def _affine(expr: str, driver: str) -> tuple[Fraction, Fraction]:
    """Parse an affine expression in ``driver`` into (slope, offset)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return Fraction(0), Fraction(str(node.value))
        if isinstance(node, ast.Name):
            if node.id != driver:
                raise UsageError(f"linkage may only reference the driver {driver[2:]!r}, got {node.id[2:]!r}")
            return Fraction(1), Fraction(0)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            a, b = ev(node.operand)
            return (-a, -b) if isinstance(node.op, ast.USub) else (a, b)
        if isinstance(node, ast.BinOp):
            (a1, b1), (a2, b2) = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a1 + a2, b1 + b2
            if isinstance(node.op, ast.Sub):
                return a1 - a2, b1 - b2
            if isinstance(node.op, ast.Mult) and (a1 == 0 or a2 == 0):
                return a1 * b2 + a2 * b1, b1 * b2
            if isinstance(node.op, ast.Div) and a2 == 0 and b2 != 0:
                return a1 / b2, b1 / b2
        raise UsageError(f"not an affine expression in {driver[2:]}: {expr!r}")

    # 'lambda' is a Python keyword; parse identifiers under a prefix
    driver = "v_" + driver
    try:
        tree = ast.parse(re.sub(r"\b([A-Za-z_]\w*)\b", r"v_\1", expr.strip()), mode="eval")
    except SyntaxError:
        raise UsageError(f"cannot parse linkage {expr!r}") from None
    return ev(tree)


def _assignment(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise UsageError(f"expected name=expression, got {text!r}")
    lhs, rhs = text.split("=", 1)
    return lhs.strip(), rhs.strip()


def _range(text: str, parts: int, what: str) -> list[str]:
    fields = text.split(":")
    if len(fields) != parts:
        raise UsageError(f"{what} expects {parts} colon-separated fields, got {text!r}")
    return fields


class Model:
    """Couplings of a run: fixed values plus affine links to one driver."""

    def __init__(self, args, driver: str | None = None):
        self.fixed: dict[int, Fraction] = {}
        for name in NAMES:
            value = getattr(args, name, None)
            if value is not None:
                self.fixed[NAMES.index(name)] = _number(value)
        self.driver = _param_index(driver) if driver else 0
        self.links: dict[int, tuple[Fraction, Fraction]] = {}
        dname = NAMES[self.driver] if self.driver < 3 else f"p{self.driver + 1}"
        for text in (getattr(args, "tie", None) or []) + (getattr(args, "link", None) or []):
            lhs, rhs = _assignment(text)
            idx = _param_index(lhs)
            if idx == self.driver:
                raise UsageError(f"cannot link the driver {lhs!r}")
            self.links[idx] = _affine(rhs, dname)
        referenced = [self.driver, *self.fixed, *self.links]
        depth = args.depth if args.depth is not None else max(referenced) + 1
        if depth < 1:
            raise UsageError("--depth must be at least 1")
        if max(referenced) >= depth:
            raise UsageError(f"parameter beyond --depth {depth} referenced")
        self.depth = depth

    def path(self) -> ParameterPath:
        link = []
        for d in range(self.depth):
            if d == self.driver:
                link.append((1.0, 0.0))
            elif d in self.links:
                a, b = self.links[d]
                link.append((float(a), float(b)))
            else:
                link.append((0.0, float(self.fixed.get(d, 0))))
        return ParameterPath(tuple(link), driver=self.driver)

    def point(self) -> CouplingVector:
        x = self.fixed.get(self.driver, Fraction(0))
        vals = []
        for d in range(self.depth):
            if d == self.driver:
                vals.append(x)
            elif d in self.links:
                a, b = self.links[d]
                vals.append(a * x + b)
            else:
                vals.append(self.fixed.get(d, Fraction(0)))
        return CouplingVector(*(float(v) for v in vals))


def _out_dir(args) -> Path:
    out = Path(args.out if args.out is not None else os.environ.get("PTLAT_OUT_DIR", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _f(x) -> float:
    return float(x) + 0.0


# ---------------------------------------------------------------- svg

def render_svg(table, width: int = 720, height: int = 440) -> str:
    """Real parts of every eigenvalue branch against the driver value.

    Grid cells containing complex eigenvalues are shaded and the real parts
    of complex eigenvalues are marked with small circles.
    """
    grid = np.asarray(table.grid, dtype=float)
    reals = np.array([s.eigenvalues.real for s in table.spectra])
    flags = np.array([s.real_flags for s in table.spectra])
    ml, mr, mt, mb = 60, 20, 20, 45
    pw, ph = width - ml - mr, height - mt - mb
    x0, x1 = float(grid[0]), float(grid[-1])
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    y0, y1 = float(reals.min()), float(reals.max())
    pad = 0.05 * (y1 - y0) if y1 > y0 else 0.5
    y0, y1 = y0 - pad, y1 + pad

    def sx(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return mt + (y1 - y) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    # shade grid cells around points with complex eigenvalues
    half = np.diff(grid) / 2 if len(grid) > 1 else np.array([0.5])
    for i, ok in enumerate(flags.all(axis=1)):
        if ok:
            continue
        left = grid[i] - (half[i - 1] if i > 0 else 0.0)
        right = grid[i] + (half[i] if i < len(half) else 0.0)
        out.append(f'<rect x="{sx(left):.2f}" y="{mt}" width="{max(sx(right) - sx(left), 1.0):.2f}" '
                   f'height="{ph}" fill="#f3d9d9"/>')
    out.append(f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for j in range(reals.shape[1]):
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(grid, reals[:, j]))
        out.append(f'<polyline fill="none" stroke="#1f4e9c" stroke-width="1.2" points="{pts}"/>')
    for i, j in zip(*np.nonzero(~flags)):
        out.append(f'<circle cx="{sx(grid[i]):.2f}" cy="{sy(reals[i, j]):.2f}" r="1.8" fill="#b22222"/>')
    for t in np.linspace(x0, x1, 5):
        out.append(f'<text x="{sx(t):.2f}" y="{height - mb + 18}" font-size="11" '
                   f'text-anchor="middle">{t:.3g}</text>')
    for t in np.linspace(y0, y1, 5):
        out.append(f'<text x="{ml - 6}" y="{sy(t) + 4:.2f}" font-size="11" text-anchor="end">{t:.3g}</text>')
    label = NAMES[table.path.driver] if table.path.driver < 3 else f"p{table.path.driver + 1}"
    out.append(f'<text x="{ml + pw / 2:.2f}" y="{height - 8}" font-size="12" text-anchor="middle">{label}</text>')
    out.append(f'<text x="14" y="{mt + ph / 2:.2f}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 14 {mt + ph / 2:.2f})">Re E</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- commands

def cmd_spectrum(args) -> int:
    if args.sweep:
        name, lo, hi, steps = _range(args.sweep, 4, "--sweep")
        model = Model(args, driver=name)
        try:
            steps = int(steps)
        except ValueError:
            raise UsageError(f"--sweep steps must be an integer, got {steps!r}") from None
        lo, hi = float(_number(lo)), float(_number(hi))
        if not lo < hi or steps < 2:
            raise UsageError("--sweep needs lo < hi and at least 2 steps")
        table = sweep(args.n, model.path(), lo, hi, steps, args.tol_real)
    else:
        model = Model(args)
        x = float(model.fixed.get(model.driver, 0))
        table = sweep(args.n, model.path(), x, x + 1.0, 2, args.tol_real)
        table = type(table)(table.n, table.path, table.grid[:1], table.spectra[:1])
    out = _out_dir(args)
    _write(out / "spectrum.csv", table.to_csv())
    if args.svg:
        _write(out / "spectrum.svg", render_svg(table))
    counts = table.real_counts
    print(f"spectrum: n={args.n} depth={model.depth} points={len(table.grid)} "
          f"real_count min={counts.min()} max={counts.max()} -> {out / 'spectrum.csv'}")
    for a, b, c in table.count_bands():
        print(f"  [{a:.6g}, {b:.6g}]  real_count={c}")
    return EXIT_OK


_VERIFY_TARGETS = {("two", "one"): 1, ("three", "two"): 2}


def cmd_verify(args) -> int:
    model = dieudonne._model(args.model)
    lay = dieudonne.LAYOUTS[model]
    want = {"one": 1, "two": 2, "three": 3}[model]
    params = []
    for name in NAMES[:want]:
        value = getattr(args, name)
        if value is None:
            raise UsageError(f"model {model!r} needs --{name}")
        params.append(_number(value))
    for name in NAMES[want:]:
        if getattr(args, name) is not None:
            raise UsageError(f"model {model!r} takes no --{name}")
    if args.n is not None and args.n != lay["n"]:
        raise UsageError(f"model {model!r} is verified at n={lay['n']}")
    report = dieudonne.verify_formulas(model, *params, strict=False)
    ok = report.match
    if args.expect_reduces_to:
        target = dieudonne._model(args.expect_reduces_to)
        if (model, target) not in _VERIFY_TARGETS:
            raise UsageError(f"no reduction from {model!r} to {target!r}")
        target_params = params[: _VERIFY_TARGETS[model, target]]
        check = dieudonne.reduction_check(model, params, target, target_params)
        report.reduction = {
            "target": target,
            "params": {k: exactlin.rational_str(v) for k, v in zip(NAMES, target_params)},
            "elements": {
                name: {"value": exactlin.rational_str(a), "target": exactlin.rational_str(b), "match": eq}
                for name, (a, b, eq) in check.items()
            },
            "match": all(eq for _, _, eq in check.values()),
        }
        ok = ok and report.reduction["match"]
    out = _out_dir(args)
    _write(out / "verify.json", report.to_json())
    status = "match" if ok else "MISMATCH"
    print(f"verify: model={model} params={[str(p) for p in params]} {status} -> {out / 'verify.json'}")
    return EXIT_OK if ok else EXIT_MISMATCH


def _coefficients(spec: str, n: int, seed) -> list[float]:
    if spec == "uniform":
        return [1.0] * n
    if spec == "random":
        rng = np.random.default_rng(seed)
        return [float(c) for c in rng.uniform(0.5, 1.5, n)]
    vals = [float(_number(t)) for t in spec.split(",")]
    if len(vals) != n:
        raise UsageError(f"--coeffs lists {len(vals)} values for n={n}")
    return vals


def _matrix(a) -> list:
    return [[_f(x) for x in row] for row in np.asarray(a)]


def cmd_metric(args) -> int:
    model = Model(args)
    h = build_hamiltonian(args.n, model.point())
    basis_kind = args.basis
    if args.select_band is not None:
        if not 1 <= args.select_band <= args.n:
            raise UsageError(f"--select-band must lie in 1..{args.n}")
        if basis_kind not in (None, "banded"):
            raise UsageError("--select-band selects a banded pseudometric")
        basis_kind = "banded"
        coeffs = [0.0] * args.n
        coeffs[args.select_band - 1] = 1.0
    else:
        coeffs = _coefficients(args.coeffs, args.n, args.seed)
    basis_kind = basis_kind or "rank-one"
    if basis_kind == "rank-one":
        basis = dieudonne.rank_one_basis(h, normalization=args.normalization)
    elif basis_kind == "kernel":
        basis = dieudonne.sylvester_kernel(h)
    else:
        basis = dieudonne.banded_basis(h)
    cand = assemble_metric(basis, coeffs)
    try:
        qh = quasi_hermiticity_residual(h, cand)
    except PTLatticeError:
        qh = None
    dyson = None
    if cand.is_positive_definite:
        fac = dyson_factor(cand, h)
        dyson = fac.to_dict()
    report = {
        "n": args.n,
        "params": {NAMES[d] if d < 3 else f"p{d + 1}": _f(p) for d, p in enumerate(model.point())},
        **cand.to_dict(),
        "quasi_hermiticity_residual": qh,
        "dyson": dyson,
        "theta": _matrix(cand.theta),
    }
    if args.select_band is not None:
        report["band_index"] = args.select_band
    if args.charge:
        report["charge"] = charge_candidate(cand, parity(args.n)).to_dict()
    out = _out_dir(args)
    _write(out / "metric.json", _dumps(report))
    print(f"metric: n={args.n} basis={cand.basis_source} {cand.positivity} "
          f"min_eigenvalue={cand.min_eigenvalue:.6g} -> {out / 'metric.json'}")
    return EXIT_OK


def cmd_ep(args) -> int:
    if not args.bracket:
        raise UsageError("ep needs --bracket lo:hi")
    lo, hi = (float(_number(t)) for t in _range(args.bracket, 2, "--bracket"))
    if not lo < hi:
        raise UsageError("--bracket needs lo < hi")
    model = Model(args)
    path = model.path()
    loc = ep_refine(args.n, path, (lo, hi), tol=args.tol, tol_real=args.tol_real, strict=args.strict)
    report = {
        "n": args.n,
        "depth": model.depth,
        "linkage": [[a, b] for a, b in path.linkage],
        "bracket": [lo, hi],
        **loc.to_dict(),
        "symmetrizability_zeros": symmetrizability_boundary(path),
    }
    out = _out_dir(args)
    _write(out / "ep.json", _dumps(report))
    print(f"ep: driver*={loc.driver_value:.10f} real_count {loc.count_real_side} -> {loc.count_complex_side} "
          f"pairs={list(loc.colliding_pairs)} -> {out / 'ep.json'}")
    return EXIT_OK


# ---------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ptlat", description="Discrete PT-symmetric square-well lattices.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_flags(sp, n_required=True):
        sp.add_argument("--n", type=int, required=n_required, help="lattice size")
        sp.add_argument("--depth", type=int, help="coupling depth K (default: highest parameter referenced)")
        for name in NAMES:
            sp.add_argument(f"--{name}", help=f"value of {name} (decimal or p/q)")
        sp.add_argument("--out", help="output directory (default $PTLAT_OUT_DIR or .)")

    def path_flags(sp):
        sp.add_argument("--tie", action="append", metavar="NAME=DRIVER", help="tie a coupling to the driver")
        sp.add_argument("--link", action="append", metavar="NAME=EXPR", help="affine link, e.g. mu=lambda+0.25")
        sp.add_argument("--tol-real", type=float, default=TOL_REAL, help="|Im E| below this counts as real")

    s = sub.add_parser("spectrum", help="spectrum at a point or along a sweep (CSV, optional SVG)")
    model_flags(s)
    path_flags(s)
    s.add_argument("--sweep", metavar="NAME:LO:HI:STEPS", help="sweep the driver over a uniform grid")
    s.add_argument("--svg", action="store_true", help="also write spectrum.svg")
    s.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("verify", help="exact check of the closed-form pseudometric elements")
    v.add_argument("--model", required=True, choices=["one", "two", "three"])
    for name in NAMES:
        v.add_argument(f"--{name}", help=f"exact value of {name} (p/q)")
    v.add_argument("--n", type=int, help="lattice size (fixed by the model)")
    v.add_argument("--expect-reduces-to", choices=["one", "two"], help="also check the reduction identity")
    v.add_argument("--out", help="output directory")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("metric", help="metric candidate, positivity and Dyson factor report")
    model_flags(m)
    m.add_argument("--tie", action="append", metavar="NAME=lambda")
    m.add_argument("--link", action="append", metavar="NAME=EXPR")
    m.add_argument("--basis", choices=["rank-one", "kernel", "banded"])
    m.add_argument("--normalization", choices=["unit", "max"], default="unit",
                   help="eigenvector scaling of the rank-one basis")
    m.add_argument("--coeffs", default="uniform", help="uniform, random or a comma-separated list")
    m.add_argument("--seed", type=int, default=0, help="seed for --coeffs random")
    m.add_argument("--select-band", type=int, metavar="K", help="report the single banded pseudometric P^(K)")
    m.add_argument("--charge", action="store_true", help="include the C = P Theta diagnostic")
    m.set_defaults(func=cmd_metric)

    e = sub.add_parser("ep", help="refine the reality transition inside a bracket")
    model_flags(e)
    path_flags(e)
    e.add_argument("--bracket", metavar="LO:HI", help="driver interval with a real_count change")
    e.add_argument("--tol", type=float, default=1e-8, help="bisection tolerance")
    e.add_argument("--strict", action="store_true", help="fail if the bracket holds several transitions")
    e.set_defaults(func=cmd_ep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DepthTooLarge, NonFinite, DimensionMismatch) as exc:
        print(f"ptlat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoSignChange, MultipleTransitions, DegenerateSpectrum, PTLatticeError) as exc:
        print(f"ptlat: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
