"""Closed-form band elements against an exact rational solve.

The sixth band of the eleven-site models (and the seventh of the thirteen-site
three-coupling model) is solved with fraction-free elimination and compared
element by element to the closed forms.
"""
from fractions import Fraction as F

from ptlat import banded_pseudometric, build_hamiltonian, element_layout, formula_elements, verify_formulas

lam = F(1, 3)
fe = formula_elements("one", lam)
print("one coupling at lambda = 1/3:", {k: str(v) for k, v in fe.values.items()})

h = build_hamiltonian(11, [lam, lam])
p = banded_pseudometric(h, 6, "rational")
layout = element_layout(11, 6)
for i in range(1, 12):
    print(" ".join(f"{str(p[i, j]) if (i, j) in layout else '.':>6}" for j in range(1, 12)))

for model, params in [("one", (F(1, 3),)), ("two", (F(1, 2), F(1, 3))), ("three", (F(1, 3), F(1, 5), F(1, 7)))]:
    rep = verify_formulas(model, *params)
    print(model, [str(x) for x in params], "match" if rep.match else "MISMATCH")

print(verify_formulas("two", F(1, 2), F(1, 3)).to_json())
