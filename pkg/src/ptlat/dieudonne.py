"""Symmetric solutions P of the Dieudonne equation  H^T P - P H = 0.

Three independent constructions are provided:

``sylvester_kernel``
    dense nullspace of the linear map P -> H^T P - P H restricted to
    symmetric matrices (SVD);
``rank_one_basis``
    outer products l l^T of left eigenvectors;
``banded_pseudometric``
    the sparse, centrosymmetric band solution P^(k), solved either in floats
    or exactly over the rationals.

The module also carries the closed-form element formulas for the
one-, two- and three-parameter band matrices and an exact verifier for them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exactlin
from .errors import (
    AnsatzKernelNotOneDimensional,
    DegenerateParameters,
    DegenerateSpectrum,
    Mismatch,
    NonRealSpectrum,
    UnexpectedKernelDimension,
)
from .lattice import LatticeHamiltonian, build_hamiltonian
from .spectra import eigenpair, eigenvalues

__all__ = [
    "FormulaElements",
    "LAYOUTS",
    "Pseudometric",
    "PseudometricBasis",
    "VerificationReport",
    "band_support",
    "banded_basis",
    "banded_pseudometric",
    "element_layout",
    "formula_elements",
    "rank_one_basis",
    "reduction_check",
    "residual",
    "sylvester_kernel",
    "verify_formulas",
]

GAP_TOL = 1e-8


@dataclass(frozen=True)
class Pseudometric:
    """Symmetric Dieudonne solution.

    ``entries`` is a float array, or an object array of Fractions when the
    solution was computed exactly.  ``band_index`` is set for band solutions.
    """

    n: int
    entries: np.ndarray
    band_index: int | None = None
    exact: bool = False

    def support(self) -> set:
        """1-based positions of the nonzero entries."""
        return {(i + 1, j + 1) for i, j in zip(*np.nonzero(self.entries != 0))}

    def as_float(self) -> np.ndarray:
        if self.exact:
            return np.array([[exactlin.to_float(x) for x in row] for row in self.entries])
        return self.entries

    def __getitem__(self, ij):
        """Entry at a 1-based position."""
        i, j = ij
        return self.entries[i - 1, j - 1]


@dataclass(frozen=True)
class PseudometricBasis:
    n: int
    members: tuple
    source: str
    hamiltonian: LatticeHamiltonian | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def stacked(self) -> np.ndarray:
        """Members as rows of an (m, n*n) float array."""
        return np.array([p.as_float().ravel() for p in self.members])


def residual(h: LatticeHamiltonian, p):
    """max |(H^T P - P H)_ij|.

    Computed exactly (returning a Fraction) when both ``h`` and ``p`` are
    exact, in floating point otherwise.
    """
    if isinstance(p, Pseudometric):
        exact = p.exact and h.is_exact
        m = p.entries if exact else p.as_float()
    else:
        m = np.asarray(p)
        exact = m.dtype == object and h.is_exact
    if m.shape != (h.n, h.n):
        raise ValueError("shape mismatch")
    if exact:
        a = h.to_exact()
        r = a.T.dot(m) - m.dot(a)
        return max((abs(x) for x in r.ravel()), default=Fraction(0))
    a = h.to_dense()
    m = np.asarray(m, dtype=float)
    return float(np.max(np.abs(a.T @ m - m @ a)))


def _check_spectrum(h: LatticeHamiltonian):
    spec = eigenvalues(h)
    if not spec.is_real:
        raise NonRealSpectrum(f"{h.n - spec.real_count} eigenvalues are not real")
    if spec.min_gap() <= GAP_TOL:
        raise DegenerateSpectrum(f"minimal eigenvalue gap {spec.min_gap():.3e} <= {GAP_TOL}")
    return spec


def _sym_coordinates(n):
    iu = np.triu_indices(n)
    # off-diagonal coordinates carry sqrt(2) so that the map is a Frobenius isometry
    w = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
    return iu, w


def _dieudonne_operator(a: np.ndarray) -> np.ndarray:
    """Matrix of P -> strict upper part of (A^T P - P A) on symmetric P."""
    n = a.shape[0]
    (ri, ci), w = _sym_coordinates(n)
    iu1 = np.triu_indices(n, 1)
    cols = []
    for i, j, wk in zip(ri, ci, w):
        e = np.zeros((n, n))
        e[i, j] = e[j, i] = 1.0 / wk
        cols.append((a.T @ e - e @ a)[iu1])
    return np.array(cols).T


def sylvester_kernel(h: LatticeHamiltonian, rtol: float = 1e-10) -> PseudometricBasis:
    """Frobenius-orthonormal basis of all symmetric solutions.

    The spectrum must be real with minimal gap above 1e-8; the kernel then
    has dimension exactly n.
    """
    _check_spectrum(h)
    n = h.n
    op = _dieudonne_operator(h.to_dense())
    _, s, vt = np.linalg.svd(op)
    s_full = np.zeros(vt.shape[0])
    s_full[: len(s)] = s
    null = vt[s_full <= rtol * s.max()] if s.size else vt
    if len(null) != n:
        raise UnexpectedKernelDimension(len(null), n)
    (ri, ci), w = _sym_coordinates(n)
    members = []
    for v in null:
        m = np.zeros((n, n))
        m[ri, ci] = v / w
        m[ci, ri] = v / w
        members.append(Pseudometric(n, m))
    return PseudometricBasis(n, tuple(members), "dense-kernel", h)


def rank_one_basis(h: LatticeHamiltonian, normalization: str = "max") -> PseudometricBasis:
    """Outer products of left eigenvectors, ordered by ascending eigenvalue.

    ``normalization='max'`` keeps the eigenvector convention (largest
    component +1); ``'unit'`` rescales each left vector to unit 2-norm.
    """
    if normalization not in ("max", "unit"):
        raise ValueError(f"unknown normalization {normalization!r}")
    spec = _check_spectrum(h)
    members = []
    for e in spec.eigenvalues.real:
        ep = eigenpair(h, float(e))
        left = ep.left_vector
        if normalization == "unit":
            left = left / np.linalg.norm(left)
        members.append(Pseudometric(h.n, np.outer(left, left)))
    return PseudometricBasis(h.n, tuple(members), "rank-one", h)


def band_support(n: int, k: int) -> list[tuple[int, int]]:
    """1-based support of the k-th band pseudometric, row-major.

    Positions with |i-j| <= k-1, |i+j-(n+1)| <= n-k and i+j = k+1 (mod 2).
    At zero coupling this is exactly the nonzero pattern of the k-th
    Chebyshev polynomial U_{k-1} of the hopping matrix.
    """
    if not 1 <= k <= n:
        raise ValueError(f"band index {k} outside 1..{n}")
    return [
        (i, j)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if abs(i - j) <= k - 1 and abs(i + j - n - 1) <= n - k and (i + j - k - 1) % 2 == 0
    ]


def _pivot(n: int, support) -> tuple[int, int]:
    c = (n + 1) / 2
    return min(support, key=lambda ij: ((ij[0] - c) ** 2 + (ij[1] - c) ** 2, ij[0], ij[1]))


def _band_system(h_entries, n, unknowns, zero):
    """Rows of the homogeneous system (H^T P - P H)_ab = 0, a < b.

    ``h_entries`` maps (row, col) 0-based to nonzero values of H.
    """
    index = {pos: t for t, pos in enumerate(unknowns)}

    def var(i, j):
        return index.get((i, j) if i <= j else (j, i))

    rows = []
    for a_ in range(n):
        for b in range(a_ + 1, n):
            row = {}
            # sum_m H[m, a] P[m, b] - P[a, m] H[m, b]
            for m in (a_ - 1, a_, a_ + 1):
                if 0 <= m < n and (m, a_) in h_entries:
                    t = var(m, b)
                    if t is not None:
                        row[t] = row.get(t, zero) + h_entries[(m, a_)]
            for m in (b - 1, b, b + 1):
                if 0 <= m < n and (m, b) in h_entries:
                    t = var(a_, m)
                    if t is not None:
                        row[t] = row.get(t, zero) - h_entries[(m, b)]
            row = {t: v for t, v in row.items() if v != 0}
            if row:
                rows.append(row)
    return rows


def _h_entries(h: LatticeHamiltonian, exact: bool) -> dict:
    conv = Fraction if exact else float
    ent = {(i, i): conv(h.diag[i]) for i in range(h.n)}
    for i in range(h.n - 1):
        if h.sup[i] != 0:
            ent[(i, i + 1)] = conv(h.sup[i])
        if h.sub[i] != 0:
            ent[(i + 1, i)] = conv(h.sub[i])
    return ent


def banded_pseudometric(h: LatticeHamiltonian, k: int, arithmetic: str = "float", rtol: float = 1e-10) -> Pseudometric:
    """Unique (up to scale) Dieudonne solution supported on the k-th band.

    The solution is scaled so that the support entry closest to the matrix
    centre (ties: smaller row, then smaller column) equals 1.  With
    ``arithmetic='rational'`` the Hamiltonian entries must be exact and the
    result is an object array of Fractions.
    """
    if arithmetic not in ("float", "rational"):
        raise ValueError(f"unknown arithmetic {arithmetic!r}")
    exact = arithmetic == "rational"
    if exact and not h.is_exact:
        raise TypeError("rational arithmetic needs exact (int/Fraction) couplings")
    n = h.n
    supp = band_support(n, k)
    unknowns = [(i - 1, j - 1) for i, j in supp if i <= j]
    zero = Fraction(0) if exact else 0.0
    rows = _band_system(_h_entries(h, exact), n, unknowns, zero)
    nu = len(unknowns)
    if exact:
        mat = [[r.get(t, zero) for t in range(nu)] for r in rows]
        null = exactlin.nullspace_exact(mat) if mat else [
            tuple(Fraction(int(i == t)) for i in range(nu)) for t in range(nu)
        ]
        if len(null) != 1:
            raise AnsatzKernelNotOneDimensional(len(null))
        vec = list(null[0])
    else:
        mat = np.zeros((max(len(rows), 1), nu))
        for r_i, r in enumerate(rows):
            for t, v in r.items():
                mat[r_i, t] = v
        _, s, vt = np.linalg.svd(mat)
        s_full = np.zeros(nu)
        s_full[: len(s)] = s
        smax = s.max() if s.size and s.max() > 0 else 1.0
        null = vt[s_full <= rtol * smax]
        if len(null) != 1:
            raise AnsatzKernelNotOneDimensional(len(null))
        vec = list(null[0])
    pi, pj = _pivot(n, supp)
    pos = unknowns.index((min(pi, pj) - 1, max(pi, pj) - 1))
    piv = vec[pos]
    if (piv == 0) if exact else (abs(piv) <= rtol * max(abs(x) for x in vec)):
        raise DegenerateParameters(f"normalising entry {(pi, pj)} vanishes")
    if exact:
        m = np.full((n, n), Fraction(0), dtype=object)
    else:
        m = np.zeros((n, n))
    for (i, j), v in zip(unknowns, vec):
        m[i, j] = m[j, i] = v / piv
    if not exact:
        # H is centrosymmetric, so the reversed solution is a solution too
        m = 0.5 * (m + m[::-1, ::-1])
    return Pseudometric(n, m, k, exact)


def banded_basis(h: LatticeHamiltonian, arithmetic: str = "float") -> PseudometricBasis:
    members = tuple(banded_pseudometric(h, k, arithmetic) for k in range(1, h.n + 1))
    return PseudometricBasis(h.n, members, "banded", h)


# Closed-form elements.  Layout tables list, for the displayed band matrix,
# the label of every support entry in the upper-left fundamental region;
# the rest follows from P = P^T and centrosymmetry.

_LAYOUT_ROWS = {
    (11, 6): [
        "0 0 0 0 0 r",
        "0 0 0 0 s 0 s",
        "0 0 0 v 0 t 0 v",
        "0 0 v 0 w 0 w 0 v",
        "0 s 0 w 0 1 0 w 0 s",
        "r 0 t 0 1 0 1 0 t 0 r",
    ],
    (13, 7): [
        "0 0 0 0 0 0 r",
        "0 0 0 0 0 s 0 s",
        "0 0 0 0 p 0 t 0 p",
        "0 0 0 v 0 q 0 q 0 v",
        "0 0 p 0 w 0 m 0 w 0 p",
        "0 s 0 q 0 u 0 u 0 q 0 s",
        "r 0 t 0 m 0 1 0 m 0 t 0 r",
    ],
}

LAYOUTS = {
    "one": {"n": 11, "k": 6, "depth": 2, "names": ("r", "s", "v", "t", "w")},
    "two": {"n": 11, "k": 6, "depth": 2, "names": ("r", "s", "v", "t", "w")},
    "three": {"n": 13, "k": 7, "depth": 3, "names": ("r", "s", "p", "v", "t", "q", "w", "m", "u")},
}

_MODEL_ALIASES = {
    "one": "one", "one_param": "one", "1": "one",
    "two": "two", "two_param": "two", "2": "two",
    "three": "three", "three_param": "three", "3": "three",
}


def _model(name: str) -> str:
    try:
        return _MODEL_ALIASES[str(name)]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; expected one, two or three") from None


def element_layout(n: int, k: int) -> dict:
    """Map of 1-based support position -> element label for a displayed band matrix."""
    rows = _LAYOUT_ROWS.get((n, k))
    if rows is None:
        raise ValueError(f"no closed-form layout for n={n}, k={k}")
    labels = {}
    for i, line in enumerate(rows, start=1):
        for j, tok in enumerate(line.split(), start=1):
            if tok == "0":
                continue
            for a, b in ((i, j), (j, i), (n + 1 - i, n + 1 - j), (n + 1 - j, n + 1 - i)):
                if labels.setdefault((a, b), tok) != tok:
                    raise AssertionError(f"inconsistent layout at {(a, b)}")
    return labels


@dataclass(frozen=True)
class FormulaElements:
    model: str
    params: tuple
    values: dict

    def __getitem__(self, name):
        return self.values[name]


def _exactify(x):
    return Fraction(x) if isinstance(x, int) else x


def formula_elements(model: str, *params) -> FormulaElements:
    """Evaluate the closed-form band elements.

    ``one``: (lam,), ``two``: (lam, mu), ``three``: (lam, mu, nu).  Exact
    inputs (int/Fraction) give exact outputs.  Denominators are >= 1 for
    all real parameters.
    """
    model = _model(model)
    if len(params) == 1 and isinstance(params[0], (list, tuple)):
        params = tuple(params[0])
    params = tuple(_exactify(p) for p in params)
    need = {"one": 1, "two": 2, "three": 3}[model]
    if len(params) != need:
        raise ValueError(f"model {model} takes {need} parameter(s), got {len(params)}")
    if model == "one":
        (lam,) = params
        den = 1 + 3 * lam**2
        vals = {
            "r": (1 - lam**2) / den,
            "s": (1 + lam) / den,
            "v": 1 / den,
            "t": (1 + lam**2) / den,
            "w": (1 + 2 * lam**2) / den,
        }
    elif model == "two":
        lam, mu = params
        den = 1 + lam**2 + 2 * mu**2
        vals = {
            "r": (1 + mu) * (1 - lam) / den,
            "s": (1 + mu) / den,
            "v": 1 / den,
            "t": (1 + lam**2) / den,
            "w": (1 + lam**2 + mu**2) / den,
        }
    else:
        lam, mu, nu = params
        den = 1 + lam**2 + 2 * mu**2 + 3 * nu**2 + nu**2 * lam**2
        vals = {
            "r": (1 - nu) * (1 + mu) * (1 - lam) / den,
            "s": (1 - nu) * (1 + mu) / den,
            "p": (1 - nu) / den,
            "v": 1 / den,
            "t": (1 - nu) * (1 + lam**2) / den,
            "q": (1 + mu**2 + lam**2) / den,
            "w": (1 + mu**2 + nu**2 + lam**2) / den,
            "m": 1 - 2 * nu**2 / den,
            "u": 1 - nu**2 / den,
        }
    return FormulaElements(model, params, vals)


def _model_couplings(model: str, params: tuple) -> tuple:
    # the one-parameter model is the two-parameter one on the line mu = lam
    return (params[0], params[0]) if model == "one" else tuple(params)


@dataclass
class VerificationReport:
    model: str
    params: dict
    n: int
    k: int
    match: bool
    elements: dict
    identities: dict = field(default_factory=dict)
    reduction: dict | None = None
    mismatches: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "model": self.model,
            "params": {k: exactlin.rational_str(v) for k, v in self.params.items()},
            "n": self.n,
            "k": self.k,
            "match": self.match,
            "elements": {
                name: {"expected": exactlin.rational_str(e["expected"]), "got": exactlin.rational_str(e["got"]),
                       "match": e["match"]}
                for name, e in self.elements.items()
            },
            "identities": self.identities,
        }
        if self.reduction is not None:
            d["reduction"] = self.reduction
        if self.mismatches:
            d["mismatches"] = [
                {"position": list(pos), "got": exactlin.rational_str(g), "expected": exactlin.rational_str(e)}
                for pos, g, e in self.mismatches
            ]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def verify_formulas(model: str, *params, strict: bool = True) -> VerificationReport:
    """Solve the band system exactly and compare it with the closed forms.

    Every support entry of the exact solution must equal its labelled
    closed-form value.  For the one-parameter model the element relations
    s(1-lam) = r and v(1+lam) = s are checked as well.  With ``strict`` a
    Mismatch carrying the report is raised on the first disagreement.
    """
    model = _model(model)
    if len(params) == 1 and isinstance(params[0], (list, tuple)):
        params = tuple(params[0])
    params = tuple(exactlin._q(p) for p in params)
    lay = LAYOUTS[model]
    n, k = lay["n"], lay["k"]
    expected = formula_elements(model, *params)
    h = build_hamiltonian(n, _model_couplings(model, params))
    if h.n < 2 * lay["depth"] + 1 or len(_model_couplings(model, params)) != lay["depth"]:
        raise ValueError("model and layout are inconsistent")
    p = banded_pseudometric(h, k, "rational")
    labels = element_layout(n, k)

    mismatches = []
    got = {}
    for pos in sorted(labels):
        name = labels[pos]
        value = p[pos]
        want = Fraction(1) if name == "1" else expected[name]
        if name != "1":
            got.setdefault(name, value)
        if value != want:
            mismatches.append((pos, value, want))
    stray = sorted(pos for pos in p.support() if pos not in labels)
    for pos in stray:
        mismatches.append((pos, p[pos], Fraction(0)))

    elements = {
        name: {"expected": expected[name], "got": got.get(name), "match": got.get(name) == expected[name]}
        for name in lay["names"]
    }
    identities = {}
    if model == "one":
        lam = params[0]
        r, s, v = got["r"], got["s"], got["v"]
        identities = {"s*(1-lambda) == r": s * (1 - lam) == r, "v*(1+lambda) == s": v * (1 + lam) == s}
    names = ("lambda", "mu", "nu")
    report = VerificationReport(
        model=model,
        params=dict(zip(names, params)),
        n=n,
        k=k,
        match=not mismatches and all(identities.values()),
        elements=elements,
        identities=identities,
        mismatches=mismatches,
    )
    if strict and mismatches:
        pos, g, e = mismatches[0]
        raise Mismatch(pos, g, e, report)
    if strict and not all(identities.values()):
        bad = next(k_ for k_, ok in identities.items() if not ok)
        raise Mismatch(bad, False, True, report)
    return report


def reduction_check(model: str, params, target: str, target_params) -> dict:
    """Compare the closed-form elements two models share, by name.

    Returns ``{name: (value, target_value, equal)}`` over the common labels.
    """
    a = formula_elements(model, *params)
    b = formula_elements(target, *target_params)
    return {name: (a[name], b[name], a[name] == b[name]) for name in a.values if name in b.values}
