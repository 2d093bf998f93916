"""Weights of the invariant operators and their intertwiners.

Prints the integer spin instantiation for j = 1 across even dimensions, then
the half-integer analog, whose primed weight is the chirality swap of the
unprimed one.
"""

from cliffspin.weights import half_integer_instance, integer_spin_instance, intertwiner_spec


def fmt(t):
    return "(" + ", ".join(str(c) for c in t) + ")"


print("integer spin, j = 1")
for m in (4, 6, 8):
    for b in (0, 1, 2):
        row = integer_spin_instance(m, 1, b)["row"]
        print(f"  m={m:2d} b={b}: order {row.order}  omega {row.unprimed.omega} -> {row.primed.omega}"
              f"  lambda {fmt(row.unprimed.lam)}  lambda' {fmt(row.primed.lam)}")

print("\nhalf-integer spin, j = 1")
for m in (4, 6, 8):
    row = half_integer_instance(m, 1, 0)["row"]
    print(f"  m={m:2d} b=0: order {row.order}  lambda {fmt(row.unprimed.lam)}  lambda' {fmt(row.primed.lam)}")

print("\nintertwiner exponents |x|^e (times x for odd k), m = 6")
for k in range(1, 6):
    spec = intertwiner_spec(k)
    print(f"  k={k}: {spec.exponents(6)}  vector factor: {spec.vector_factor}")
