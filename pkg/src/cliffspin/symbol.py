"""Principal symbols of the higher spin operators and their invertibility.

Every term of D_(1,k) has exactly k x-derivatives and u-only coefficients, so
the full symbol equals the principal symbol.  Two independent routes compute
it:

* plane waves: ``D[(xi.x)^k / k! * b]`` is exactly ``sigma_xi(D) b``;
* the formula route substitutes ``d/dx_i -> xi_i`` in the operator's definition
  and applies the resulting u-only operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from .clifford import Multivector
from .conformal import build_operator
from .fields import RadialField, builtin
from .linalg import det, rational_rank
from .scalars import Q, as_scalar, fmt_rational
from .sphere import PolySpaceBasis, basis_H, basis_M

__all__ = [
    "SymbolMatrix",
    "principal_symbol",
    "plane_wave_symbol",
    "formula_symbol",
    "operator_symbol_matrix",
    "bosonic_det_closed_form",
    "bosonic_det_factor",
    "paper_P_evaluate",
    "paper_P_sum_form",
    "ellipticity_report",
    "DEFAULT_XI",
]


@dataclass
class SymbolMatrix:
    m: int
    k: int
    xi: tuple
    basis: PolySpaceBasis
    entries: list
    rank: int
    det: object = None
    route: str = "plane_wave"
    notes: dict = field(default_factory=dict)

    @property
    def dim(self):
        return len(self.entries)

    @property
    def full_rank(self):
        return self.rank == self.dim

    def to_json(self):
        out = {
            "m": self.m,
            "k": self.k,
            "xi": [fmt_rational(c) for c in self.xi],
            "space": self.basis.space,
            "dim": self.dim,
            "rank": self.rank,
            "route": self.route,
        }
        if self.det is not None:
            out["det"] = fmt_rational(self.det)
        out.update(self.notes)
        return out


def _check_xi(m, xi):
    xi = tuple(as_scalar(c) for c in xi)
    if len(xi) != m:
        raise ValueError(f"frequency needs {m} components, got {len(xi)}")
    if not any(xi):
        raise ValueError("frequency must be nonzero")
    return xi


def _plane_wave(m, xi, k):
    lin = RadialField.zero(m)
    for i, c in enumerate(xi, start=1):
        if c:
            lin = lin + RadialField.x(m, i) * c
    return (lin**k) / factorial(k)


def _u_linear_coefficients(g: RadialField):
    """``[c_1, ..., c_m]`` (raw blade dicts) with ``g = sum u_i c_i``; g must be u-linear and x-free."""
    m = g.dim
    out = [dict() for _ in range(m)]
    for key, coeff in g.coefficient_map().items():
        if any(key[:m]) or any(key[2 * m : 3 * m]) or key[3 * m] or sum(key[m : 2 * m]) != 1:
            raise ValueError("symbol image is not a constant-coefficient linear form in u")
        i = key[m : 2 * m].index(1)
        out[i] = coeff
    return out


def plane_wave_symbol(op, order: int, xi, basis_elements):
    """Images ``sigma_xi(op) b`` for each b, via op[(xi.x)^order/order! * b]."""
    m = op.dim
    xi = _check_xi(m, xi)
    w = _plane_wave(m, xi, order)
    return [op(w * b) for b in basis_elements]


def formula_symbol(m: int, k: int, xi, basis_elements):
    """Images under the u-only operator obtained by d/dx_i -> xi_i in the defining formula."""
    xi = _check_xi(m, xi)
    s = sum(c * c for c in xi)
    xvec = builtin("mult_const", m, Multivector.vector(m, xi))
    inner_u = None
    inner_du = None
    for i, c in enumerate(xi, start=1):
        if not c:
            continue
        a = builtin("mult_uj", m, i).scale(c)
        d = builtin("deriv_u", m, i).scale(c)
        inner_u = a if inner_u is None else inner_u + a
        inner_du = d if inner_du is None else inner_du + d
    if k % 2 == 0:
        n = k // 2
        c = Q(4 * n, m + 2 * n - 2)
        op = builtin("identity", m).scale(s**n) - (inner_u @ inner_du).scale(c * s ** (n - 1))
    else:
        n = (k + 1) // 2
        c1 = Q(2, m + 2 * n - 2)
        op = xvec.scale(s ** (n - 1)) - (builtin("mult_vector_u", m) @ inner_du).scale(c1 * s ** (n - 1))
        if n >= 2:
            c2 = Q(4 * n - 4, m + 2 * n - 2)
            op = op - (inner_u @ (inner_du @ xvec)).scale(c2 * s ** (n - 2))
    return [op(b) for b in basis_elements]


def _bosonic_matrix(images):
    m = images[0].dim if images else 0
    cols = []
    for g in images:
        coeffs = _u_linear_coefficients(g)
        col = []
        for c in coeffs:
            if any(b for b in c if b):
                raise ValueError("bosonic symbol image is not scalar valued")
            col.append(c.get(0, 0))
        cols.append(col)
    return [[cols[j][i] for j in range(m)] for i in range(m)]


def _fermionic_coordinates(m, g):
    """Right-module coordinates ``Y_s`` with ``g = sum_s (e_s u_m + e_m u_s) Y_s``."""
    coeffs = _u_linear_coefficients(g)
    em = Multivector.basis(m, m)
    ys = [-(em * Multivector._raw(m, dict(coeffs[s]))) for s in range(m - 1)]
    back = sum((Multivector.basis(m, s + 1) * y for s, y in enumerate(ys)), Multivector.scalar(m, 0))
    if back != Multivector._raw(m, dict(coeffs[m - 1])):
        raise ValueError("symbol image leaves M_1")
    return ys


def _fermionic_matrix(m, images):
    """Real matrix on the (m-1)*2^m component space; column (s, A) is sigma(b_s e_A)."""
    size = 1 << m
    n = (m - 1) * size
    rows = [[0] * n for _ in range(n)]
    for s, g in enumerate(images):
        ys = _fermionic_coordinates(m, g)
        for a in range(size):
            ea = Multivector._raw(m, {a: 1})
            col = s * size + a
            for t, y in enumerate(ys):
                for b, v in (y * ea).terms.items():
                    rows[t * size + b][col] = v
    return rows


def _check_fermionic_basis(basis):
    m = basis.m
    for s, b in enumerate(basis.elements, start=1):
        want = RadialField.u(m, m) * Multivector.basis(m, s) + RadialField.u(m, s) * Multivector.basis(m, m)
        if b != want:
            raise ValueError("unexpected M_1 basis; coordinates assume e_s u_m + e_m u_s")


def principal_symbol(m: int, k: int, xi, route="plane_wave", with_det=True) -> SymbolMatrix:
    """Exact symbol matrix of D_(1,k) at frequency xi.

    Bosonic: m x m matrix over {u_1..u_m}.  Fermionic: the real form of the
    symbol on the Cl_m-coefficient space of M_1, of size (m-1)*2^m (its
    complexification has the same rank).
    """
    if k < 1:
        raise ValueError("order k must be >= 1")
    xi = _check_xi(m, xi)
    basis = basis_H(m, 1) if k % 2 == 0 else basis_M(m, 1)
    if route == "plane_wave":
        images = plane_wave_symbol(build_operator(m, k).op, k, xi, basis.elements)
    elif route == "formula":
        images = formula_symbol(m, k, xi, basis.elements)
    else:
        raise ValueError(f"unknown route {route!r}")
    if k % 2 == 0:
        M = _bosonic_matrix(images)
        d = det(M) if with_det else None
        return SymbolMatrix(m, k, xi, basis, M, rational_rank(M), d, route)
    _check_fermionic_basis(basis)
    M = _fermionic_matrix(m, images)
    return SymbolMatrix(m, k, xi, basis, M, rational_rank(M), None, route)


def operator_symbol_matrix(op, order: int, xi):
    """Symbol of a scalar-coefficient operator preserving u-linear scalar fields, over {u_i}."""
    m = op.dim
    basis = basis_H(m, 1)
    return _bosonic_matrix(plane_wave_symbol(op, order, xi, basis.elements))


def bosonic_det_factor(m: int, n: int):
    """(m-2n-2)/(m+2n-2); zero exactly when m = 2n+2."""
    return Q(m - 2 * n - 2, m + 2 * n - 2)


def bosonic_det_closed_form(m: int, n: int, xi):
    """|xi|^(2nm) (m-2n-2)/(m+2n-2)."""
    xi = _check_xi(m, xi)
    s = sum(c * c for c in xi)
    return s ** (n * m) * bosonic_det_factor(m, n)


def _odd_constants(m, n):
    return Q(2, m + 2 * n - 2), Q(4 * n - 4, m + 2 * n - 2)


def paper_P_evaluate(m: int, n: int, x) -> Multivector:
    """Closed form ``-x|x|^2 e_m + (c1+c2)|x|^2 x_m - (c1+c2) x|x|^2 e_m``."""
    x = _check_xi(m, x)
    c1, c2 = _odd_constants(m, n)
    r2 = sum(c * c for c in x)
    X = Multivector.vector(m, x)
    em = Multivector.basis(m, m)
    c = c1 + c2
    return -(X * em) * r2 + Multivector.scalar(m, c * r2 * x[m - 1]) - (X * em) * (c * r2)


def paper_P_sum_form(m: int, n: int, x) -> Multivector:
    """Intermediate form ``-x|x|^2 e_m - sum_{j<m} (c1 e_j |x|^2 + c2 x x_j)(x_m e_j + x_j e_m)``."""
    x = _check_xi(m, x)
    c1, c2 = _odd_constants(m, n)
    r2 = sum(c * c for c in x)
    X = Multivector.vector(m, x)
    em = Multivector.basis(m, m)
    out = -(X * em) * r2
    for j in range(1, m):
        ej = Multivector.basis(m, j)
        a = ej * (c1 * r2) + X * (c2 * x[j - 1])
        b = ej * x[m - 1] + em * x[j - 1]
        out = out - a * b
    return out


# fixed rational frequencies, padded or truncated to the dimension
DEFAULT_XI = (
    (1,),
    (0, 1),
    (3, 4),
    (1, 2, 2),
    (1, -1, 2, 3),
    (Q(1, 2), Q(1, 3), 1),
    (2, 0, -1, 0, 1),
    (-3, 1, 1, 2, -1, 1),
    (5, -2, 1),
    (1, 1, 1, 1, 1, 1, 1, 1),
)


def default_xi(m, count=10):
    out = []
    for v in DEFAULT_XI[:count]:
        v = list(v)[:m] + [0] * max(0, m - len(v))
        if any(v):
            out.append(tuple(as_scalar(c) for c in v))
    return out


def ellipticity_report(m_list, n_list, parity="even", xi_samples=None):
    """Rank and determinant verdicts per (m, n, xi), with exact closed-form factors."""
    records = []
    for m in m_list:
        samples = xi_samples if xi_samples is not None else default_xi(m)
        for n in n_list:
            k = 2 * n if parity == "even" else 2 * n - 1
            for xi in samples:
                S = principal_symbol(m, k, xi)
                rec = {"m": m, "n": n, "k": k, "parity": parity, "xi": [fmt_rational(as_scalar(c)) for c in xi],
                       "dim": S.dim, "rank": S.rank, "full_rank": S.full_rank}
                if parity == "even":
                    closed = bosonic_det_closed_form(m, n, xi)
                    factor = bosonic_det_factor(m, n)
                    rec.update(det=fmt_rational(S.det), closed_form_det=fmt_rational(closed),
                               closed_form_factor=fmt_rational(factor), det_matches=S.det == closed)
                    if not factor:
                        rec["degenerate"] = "factor (m-2n-2)/(m+2n-2) vanishes at m = 2n+2"
                else:
                    P = paper_P_evaluate(m, n, xi)
                    rec.update(P_nonzero=not P.is_zero(), agrees=(not P.is_zero()) == S.full_rank)
                records.append(rec)
    return records
