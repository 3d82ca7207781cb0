import json
from fractions import Fraction as F

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ptlat import (
    AnsatzKernelNotOneDimensional,
    DegenerateSpectrum,
    Mismatch,
    band_support,
    banded_basis,
    banded_pseudometric,
    build_hamiltonian,
    element_layout,
    formula_elements,
    rank_one_basis,
    residual,
    sylvester_kernel,
    verify_formulas,
)
from ptlat import dieudonne
from ptlat.errors import NonRealSpectrum
from oracles import load_symbolic


def _golden_labels(name):
    rows = load_symbolic(name)
    return {(i + 1, j + 1): c for i, row in enumerate(rows) for j, c in enumerate(row) if c != "0"}


# ---------------------------------------------------------------- layouts

@pytest.mark.parametrize("n,k,golden", [(11, 6, "p6_n11_labels.txt"), (13, 7, "p7_n13_labels.txt")])
def test_layout_matches_display(n, k, golden):
    want = _golden_labels(golden)
    assert element_layout(n, k) == want
    assert set(band_support(n, k)) == set(want)


@pytest.mark.parametrize("n,k,golden", [(11, 6, "p6_n11_labels.txt"), (13, 7, "p7_n13_labels.txt")])
def test_pivot_is_a_displayed_one(n, k, golden):
    labels = _golden_labels(golden)
    pivot = dieudonne._pivot(n, band_support(n, k))
    assert labels[pivot] == "1"


@given(st.integers(2, 16).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))))
def test_band_support_symmetries(nk):
    n, k = nk
    s = set(band_support(n, k))
    assert s == {(j, i) for i, j in s}
    assert s == {(n + 1 - i, n + 1 - j) for i, j in s}
    # the k-th band pattern is the support of U_{k-1} of the free hopping matrix
    a = np.eye(n, k=1) + np.eye(n, k=-1)
    u_prev, u = np.zeros((n, n)), np.eye(n)
    for _ in range(k - 1):
        u_prev, u = u, a @ u - u_prev
    assert s == {(i + 1, j + 1) for i, j in zip(*np.nonzero(np.round(u)))}


def test_band_support_bounds():
    with pytest.raises(ValueError):
        band_support(5, 0)
    with pytest.raises(ValueError):
        band_support(5, 6)


# ---------------------------------------------------------------- banded solver

@pytest.mark.parametrize("n,params", [(11, [0.3, 0.2]), (11, [0.6]), (13, [0.2, 0.4, 0.1]), (8, [0.5, 0.3]), (12, [0.45])])
def test_banded_basis_properties(n, params):
    h = build_hamiltonian(n, params)
    basis = banded_basis(h)
    kernel = sylvester_kernel(h)
    q = kernel.stacked().T
    for k, p in enumerate(basis.members, start=1):
        m = p.as_float()
        assert np.array_equal(m, m.T)
        assert np.array_equal(m, m[::-1, ::-1])
        assert p.support() <= set(band_support(n, k))
        assert residual(h, p) < 1e-12
        # independent route: the band solution lies in the dense kernel
        x, *_ = np.linalg.lstsq(q, m.ravel(), rcond=None)
        assert np.linalg.norm(q @ x - m.ravel()) < 1e-10 * np.linalg.norm(m)
    assert np.linalg.matrix_rank(basis.stacked()) == n


def test_banded_exact_residual_zero():
    h = build_hamiltonian(13, [F(1, 3), F(1, 5), F(1, 7)])
    for k in (1, 4, 7, 13):
        p = banded_pseudometric(h, k, "rational")
        assert p.exact and residual(h, p) == 0


def test_banded_rational_needs_exact_input():
    with pytest.raises(TypeError):
        banded_pseudometric(build_hamiltonian(11, [0.3]), 6, "rational")


def test_banded_nullity_error():
    # lambda = 1 cuts the end sites off (sub[0] = 0); the middle band then has a 2-dim kernel
    h = build_hamiltonian(5, [F(1)])
    with pytest.raises(AnsatzKernelNotOneDimensional) as exc:
        banded_pseudometric(h, 3, "rational")
    assert exc.value.nullity == 2


def test_displayed_one_model_values():
    lam = F(1, 3)
    p = banded_pseudometric(build_hamiltonian(11, [lam, lam]), 6, "rational")
    fe = formula_elements("one", lam)
    for pos, name in element_layout(11, 6).items():
        assert p[pos] == (1 if name == "1" else fe[name])


# ---------------------------------------------------------------- closed forms

def test_formula_examples():
    fe = formula_elements("one", F(1, 3))
    assert fe.values == {"r": F(2, 3), "s": F(1), "v": F(3, 4), "t": F(5, 6), "w": F(11, 12)}
    fe = formula_elements("two", F(1, 2), F(1, 3))
    assert fe.values == {"r": F(24, 53), "s": F(48, 53), "v": F(36, 53), "t": F(45, 53), "w": F(49, 53)}
    for model, k in (("one", 1), ("two", 2), ("three", 3)):
        assert all(v == 1 for v in formula_elements(model, *[0] * k).values.values())
    with pytest.raises(ValueError):
        formula_elements("two", F(1))


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50))
@settings(max_examples=50)
def test_denominators_at_least_one(lam, mu, nu):
    lam, mu, nu = F(lam), F(mu), F(nu)
    assert 1 + 3 * lam**2 >= 1
    assert 1 + lam**2 + 2 * mu**2 >= 1
    assert 1 + lam**2 + 2 * mu**2 + 3 * nu**2 + nu**2 * lam**2 >= 1
    formula_elements("three", lam, mu, nu)


@pytest.mark.parametrize("model,golden,n,names", [
    ("one", "p6_n11_labels.txt", 11, ("lambda",)),
    ("two", "p6_n11_labels.txt", 11, ("lambda", "mu")),
    ("three", "p7_n13_labels.txt", 13, ("lambda", "mu", "nu")),
])
def test_closed_forms_solve_dieudonne_symbolically(model, golden, n, names):
    """Substitute the closed forms into the displayed pattern and expand H^T P - P H."""
    syms = sympy.symbols(" ".join(n_ + "_" for n_ in names))
    syms = syms if isinstance(syms, tuple) else (syms,)
    couplings = [syms[0], syms[0]] if model == "one" else list(syms)
    fe = formula_elements(model, *syms)
    labels = _golden_labels(golden)
    p = sympy.zeros(n, n)
    for (i, j), name in labels.items():
        p[i - 1, j - 1] = 1 if name == "1" else fe[name]
    h = sympy.zeros(n, n)
    for i in range(n):
        h[i, i] = 2
    for i in range(n - 1):
        h[i, i + 1] = h[i + 1, i] = -1
    for d, c in enumerate(couplings, start=1):
        s = c if d % 2 else -c
        h[d - 1, d], h[d, d - 1] = -1 - s, -1 + s
        h[n - d, n - d - 1], h[n - d - 1, n - d] = -1 - s, -1 + s
    r = (h.T * p - p * h).applyfunc(sympy.cancel)
    assert r == sympy.zeros(n, n)


@pytest.mark.parametrize("model,params", [
    ("one", (F(1, 3),)), ("one", (F(-2, 5),)), ("one", (F(9, 10),)), ("one", (F(7, 3),)),
    ("two", (F(1, 2), F(1, 3))), ("two", (F(-3, 4), F(5, 2))),
    ("three", (F(1, 3), F(1, 5), F(1, 7))), ("three", (F(-1, 2), F(2, 3), F(-4, 5))),
])
def test_verify_formulas(model, params):
    rep = verify_formulas(model, *params)
    assert rep.match and not rep.mismatches
    assert all(e["match"] for e in rep.elements.values())


def test_report_json():
    rep = verify_formulas("one", F(1, 3))
    d = json.loads(rep.to_json())
    assert d["params"] == {"lambda": "1/3"}
    assert d["elements"]["w"] == {"expected": "11/12", "got": "11/12", "match": True}
    assert d["identities"] == {"s*(1-lambda) == r": True, "v*(1+lambda) == s": True}
    assert (d["n"], d["k"]) == (11, 6)


def test_mismatch_raised(monkeypatch):
    real = dieudonne.formula_elements

    def wrong(model, *params):
        fe = real(model, *params)
        vals = dict(fe.values)
        vals["t"] += F(1, 1000)
        return dieudonne.FormulaElements(fe.model, fe.params, vals)

    monkeypatch.setattr(dieudonne, "formula_elements", wrong)
    with pytest.raises(Mismatch) as exc:
        verify_formulas("two", F(1, 2), F(1, 3))
    assert exc.value.report is not None and not exc.value.report.match
    rep = verify_formulas("two", F(1, 2), F(1, 3), strict=False)
    assert not rep.match and rep.elements["t"]["match"] is False
    assert len(rep.mismatches) == 4


# ---------------------------------------------------------------- kernel and rank-one

def test_kernel_hermitian_three():
    h = build_hamiltonian(3, [0.0])
    q = sylvester_kernel(h).stacked()
    assert q.shape == (3, 9)
    x, *_ = np.linalg.lstsq(q.T, np.eye(3).ravel(), rcond=None)
    assert np.allclose(q.T @ x, np.eye(3).ravel(), atol=1e-12)


def test_kernel_orthonormal_and_residuals():
    h = build_hamiltonian(5, [0.4])
    kb = sylvester_kernel(h)
    assert len(kb) == 5 and kb.source == "dense-kernel"
    q = kb.stacked()
    np.testing.assert_allclose(q @ q.T, np.eye(5), atol=1e-12)
    for p in kb:
        assert residual(h, p) < 1e-12
        assert np.array_equal(p.as_float(), p.as_float().T)


def test_kernel_errors():
    with pytest.raises(DegenerateSpectrum):
        sylvester_kernel(build_hamiltonian(5, [1.0]))
    with pytest.raises(NonRealSpectrum):
        sylvester_kernel(build_hamiltonian(11, [1.3, 1.3]))
    with pytest.raises(DegenerateSpectrum):
        rank_one_basis(build_hamiltonian(11, [1.3, 1.3]))


def test_rank_one_members():
    h = build_hamiltonian(5, [0.4])
    rb = rank_one_basis(h)
    assert rb.source == "rank-one" and len(rb) == 5
    for p in rb:
        m = p.as_float()
        assert np.linalg.matrix_rank(m) == 1
        assert residual(h, p) < 1e-12


def test_rank_one_resolution_of_identity():
    rb = rank_one_basis(build_hamiltonian(3, [0.0]), normalization="unit")
    np.testing.assert_allclose(sum(p.as_float() for p in rb), np.eye(3), atol=1e-14)
    with pytest.raises(ValueError):
        rank_one_basis(build_hamiltonian(3, [0.0]), normalization="l1")


def test_residual_examples():
    lam = 0.35
    r = build_hamiltonian(7, [lam])
    d = r.to_dense()
    assert residual(r, np.eye(7)) == pytest.approx(2 * abs(lam), abs=1e-15)
    corner = d.T - d
    assert abs(corner[0, 1]) == pytest.approx(2 * lam)
    assert residual(build_hamiltonian(7, [0.0]), np.eye(7)) == 0
    with pytest.raises(ValueError):
        residual(r, np.eye(6))
