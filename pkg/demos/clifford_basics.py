"""A first look at the Clifford algebra layer.

Run with ``python3 demos/clifford_basics.py``.  Everything is exact: the
scalars are rationals, so every equality printed below is an identity.
"""

from cliffspin.clifford import Multivector, VersorProduct, primitive_idempotent, reflect_vector, reversion, witt_frame

m = 3
e1, e2, e3 = (Multivector.basis(m, i) for i in (1, 2, 3))

print("e1 e1        =", e1 * e1)
print("e1 e2 + e2 e1 =", e1 * e2 + e2 * e1)

# products of bivectors land on a single blade, with a sign
b = (e1 * e2) * (e2 * e3)
print("(e1e2)(e2e3) =", b)

x = Multivector.vector(m, [1, 2, 3]) + e1 * e2 * 5
print("x            =", x)
print("reversion(x) =", reversion(x))

# reflection in the hyperplane orthogonal to a = (3, 4, 0)
y = reflect_vector((3, 4, 0), e1)
print("reflect e1 in a=(3,4,0):", y, " |y|^2 =", y.norm_sq())

# a spin element built from two reflections acts as a rotation
s = VersorProduct(m, ((1, 0, 0), (1, 1, 0)))
print("rotation matrix of s:")
for row in s.matrix():
    print("   ", [str(c) for c in row])

# Witt basis and the primitive idempotent in dimension 4
f, fd, _ = witt_frame(4)
I = primitive_idempotent(4)
print("f1^2 =", f[0] * f[0], "  f1 f1+ + f1+ f1 =", f[0] * fd[0] + fd[0] * f[0])
print("I^2 == I:", I * I == I)
