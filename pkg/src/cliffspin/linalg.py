"""Exact linear algebra over the rationals and the Gaussian rationals.

Plain Gauss-Jordan elimination with exact division; the matrices met in this
package are small (at most a few hundred columns) so nothing cleverer is needed.
"""

from __future__ import annotations

from .scalars import div

__all__ = ["rref", "rank", "rational_rank", "nullspace", "det", "solve", "independent_subset"]


def rref(rows):
    """Reduced row echelon form.  Returns ``(matrix, pivot_columns)``."""
    a = [list(r) for r in rows]
    if not a:
        return a, []
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        if pv != 1:
            a[r] = [div(v, pv) if v else 0 for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                ri = a[r]
                a[i] = [vi - f * vr if vr else vi for vi, vr in zip(a[i], ri)]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def independent_subset(rows):
    """Indices of a maximal linearly independent subset of ``rows`` (greedy, in order)."""
    if not rows:
        return []
    _, piv = rref([list(col) for col in zip(*rows)])
    return piv


def nullspace(rows, ncols=None):
    """Basis of ``{v : A v = 0}`` as a list of vectors."""
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    ncols = len(rows[0])
    a, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, c in enumerate(piv):
            v[c] = -a[r][f]
        basis.append(v)
    return basis


def det(rows):
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    a = [list(r) for r in rows]
    d = 1
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            d = -d
        pv = a[c][c]
        d = d * pv
        for i in range(c + 1, n):
            if a[i][c]:
                f = div(a[i][c], pv)
                a[i] = [vi - f * vc for vi, vc in zip(a[i], a[c])]
    return d


def solve(rows, rhs):
    """One exact solution of ``A v = rhs`` or ``None`` when inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    a, piv = rref(aug)
    if ncols in piv:
        return None
    v = [0] * ncols
    for r, c in enumerate(piv):
        v[c] = a[r][ncols]
    return v


_PRIME = (1 << 61) - 1


def _mod_rank(rows, p=_PRIME):
    """Rank modulo p of a rational matrix, or None if a denominator vanishes mod p."""
    a = []
    for r in rows:
        row = []
        for v in r:
            num, den = int(v.numerator), int(v.denominator)
            if den % p == 0:
                return None
            row.append(num * pow(den, -1, p) % p)
        a.append(row)
    rk = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        inv = pow(a[rk][c], -1, p)
        prow = [v * inv % p for v in a[rk]]
        a[rk] = prow
        for i in range(rk + 1, len(a)):
            f = a[i][c]
            if f:
                a[i] = [(vi - f * vp) % p for vi, vp in zip(a[i], prow)]
        rk += 1
    return rk


def rational_rank(rows):
    """Exact rank of a rational matrix.

    A modular rank equal to the full size certifies full rank (a nonzero minor
    mod p is nonzero over Q); anything else falls back to exact elimination.
    """
    if not rows:
        return 0
    full = min(len(rows), len(rows[0]))
    try:
        r = _mod_rank(rows)
    except (AttributeError, TypeError):
        r = None
    if r == full:
        return r
    return rank(rows)
