"""Principal symbols and where ellipticity breaks down.

The even order symbol has determinant c * |xi|^(2nm) with an explicit factor
c that vanishes at m = 2n + 2.  For the odd order operators the symbol drops
rank at m = 2n while the cubic polynomial that should detect this stays
nonzero.
"""

from cliffspin.symbol import bosonic_det_factor, paper_P_evaluate, principal_symbol

print("even order: det factor (m-2n-2)/(m+2n-2)")
for m in range(3, 9):
    row = []
    for n in (1, 2, 3):
        row.append(f"n={n}: {bosonic_det_factor(m, n)!s:>6}")
    print(f"  m={m}  " + "  ".join(row))

S = principal_symbol(4, 2, (1, 2, 2, 4))
print("\nm=4, order 2 (m = 2n+2) at xi=(1,2,2,4): det =", S.det, " rank =", S.rank)

print("\nodd order: symbol rank against P(xi) at xi = e_m")
for m, n in ((3, 1), (4, 1), (4, 2), (5, 2), (6, 2)):
    xi = (0,) * (m - 1) + (1,)
    S = principal_symbol(m, 2 * n - 1, xi)
    P = paper_P_evaluate(m, n, xi)
    print(f"  m={m} n={n}: rank {S.rank}/{S.dim}  P = {P}")
