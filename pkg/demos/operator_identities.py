"""Conformally invariant higher spin operators on small examples.

Builds the even and odd order operators, applies them to a few fields and
checks the symmetry relations on a monomial sweep.
"""

import time

from cliffspin.conformal import (
    build_bosonic,
    build_fermionic,
    verify_generalized_symmetry,
    verify_inversion_conjugation,
    verify_inversion_square,
    verify_reductions,
)
from cliffspin.expr import parse_field

m = 3
D2 = build_bosonic(m, 1)
print("order 2 operator:", D2.op.describe()[:100], "...")
f = parse_field("x1^2*u1", m)
print("D_2 (x1^2 u1) =", D2.op(f).to_latex())

D1 = build_fermionic(4, 1)
g = parse_field("x1*(e1*u4 + e4*u1)", 4)
print("D_1 applied to x1 (e1 u4 + e4 u1) in m = 4:", D1.op(g).to_latex())

print("\nsymmetries, m = 3, order 2 (sweep |alpha| <= 4):")
t = time.time()
for rep in verify_generalized_symmetry(m, 1, "even"):
    print("   ", rep.summary())
for rep in (verify_inversion_square(m, 2), verify_inversion_conjugation(m, 1, "even")):
    print("   ", rep.summary())
print(f"    ({time.time() - t:.1f}s)")

print("\nfirst order reductions:")
for rep in verify_reductions(m):
    print("   ", rep.summary())

print("\na perturbed coefficient breaks the SCT relation:")
for rep in verify_generalized_symmetry(m, 1, "even", perturb=1, families=("sct",)):
    print("   ", rep.summary())
