from fractions import Fraction as F

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ptlat import RationalMatrix, SingularMatrix, build_hamiltonian, det_exact, nullspace_exact, solve_exact, to_float
from ptlat.dieudonne import _band_system, _h_entries, band_support
from ptlat.errors import RationalOverflow
from ptlat.exactlin import bareiss_echelon, parse_rational, rational_str
from oracles import leibniz_det

rationals = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 100)


@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if a != 0:
        assert (a * (1 / a)) == 1 and (b / a) * a == b
    assert a.denominator > 0


def test_canonical_form():
    x = F(6, -4)
    assert (x.numerator, x.denominator) == (-3, 2)
    assert rational_str(F(0)) == "0/1"
    assert rational_str(F(11, 12)) == "11/12"
    assert rational_str(3) == "3/1"
    assert parse_rational(" -2/5 ") == F(-2, 5)
    assert parse_rational("0.25") == F(1, 4)


def test_to_float():
    assert to_float(F(1, 3)) == 1 / 3
    assert to_float(F(0, 1)) == 0.0
    lam = 1 / 3
    assert abs(to_float(F(11, 12)) - (1 + 2 * lam**2) / (1 + 3 * lam**2)) < 4e-16
    with pytest.raises(RationalOverflow):
        to_float(F(10**400, 3))


int_matrix = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)
)


@given(int_matrix)
@settings(max_examples=80)
def test_bareiss_integral_and_det(a):
    # every division is checked to be exact inside bareiss_echelon
    e, pivots, _ = bareiss_echelon(a)
    assert all(isinstance(x, int) for row in e for x in row)
    assert det_exact(a) == sympy.Matrix(a).det()
    if len(a) <= 5:
        assert det_exact(a) == leibniz_det(a)


def test_det_rational():
    a = [[F(1, 2), F(1, 3)], [F(1, 4), F(1, 5)]]
    assert det_exact(a) == F(1, 10) - F(1, 12)


def test_nullspace_examples():
    (v,) = nullspace_exact([[1, 1], [2, 2]])
    assert v[0] == -v[1] != 0
    assert nullspace_exact(RationalMatrix.identity(3)) == []


@given(st.integers(1, 5), st.integers(1, 7), st.data())
@settings(max_examples=60)
def test_nullspace_exact_zero(rows, cols, data):
    a = data.draw(st.lists(st.lists(rationals, min_size=cols, max_size=cols), min_size=rows, max_size=rows))
    basis = nullspace_exact(a)
    m = RationalMatrix(a)
    for v in basis:
        assert all(x == 0 for x in m @ v)
    assert len(basis) == cols - sympy.Matrix(a).rank()


def test_restricted_band_system_nullity_one():
    h = build_hamiltonian(11, [F(1, 3), F(1, 3)])
    supp = band_support(11, 6)
    unknowns = [(i - 1, j - 1) for i, j in supp if i <= j]
    rows = _band_system(_h_entries(h, True), 11, unknowns, F(0))
    mat = [[r.get(t, F(0)) for t in range(len(unknowns))] for r in rows]
    assert len(nullspace_exact(mat)) == 1


def test_solve_examples():
    b = (F(1, 7), F(-3), F(2, 9))
    assert solve_exact(RationalMatrix.identity(3), b) == b
    assert solve_exact([[2, 1], [1, 1]], [3, 2]) == (1, 1)
    with pytest.raises(SingularMatrix):
        solve_exact([[1, 2], [2, 4]], [1, 1])


def test_solve_random_multiply_back():
    rng = np.random.default_rng(6)
    for _ in range(10):
        a = [[F(int(rng.integers(-20, 21)), int(rng.integers(1, 9))) for _ in range(6)] for _ in range(6)]
        b = [F(int(rng.integers(-20, 21)), int(rng.integers(1, 9))) for _ in range(6)]
        if det_exact(a) == 0:
            continue
        x = solve_exact(a, b)
        assert RationalMatrix(a) @ x == tuple(b)


def test_rational_matrix_ops():
    a = RationalMatrix([[1, F(1, 2)], [0, 3]])
    assert a.T[0, 1] == 0 and a.T[1, 0] == F(1, 2)
    assert a @ RationalMatrix.identity(2) == a
    assert hash(a) == hash(RationalMatrix([[1, F(1, 2)], [0, 3]]))
    np.testing.assert_array_equal(a.to_float(), [[1, 0.5], [0, 3]])
    with pytest.raises(ValueError):
        RationalMatrix([[1, 2], [3]])
    with pytest.raises(TypeError):
        RationalMatrix([[1.0j]])
