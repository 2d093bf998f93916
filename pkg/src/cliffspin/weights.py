"""Highest weights, conformal weights and orders of conformally invariant operators.

The even-dimensional case (m = 2n) uses a tuple ``(B, D_1..D_(n-2), A, C)`` and
the odd case (m = 2n+1) a tuple ``(B, D_1..D_(n-1), A)``.  From the tuple:

* even: ``lambda = sum (D_i - 1) lambda_i + (A-1) sigma+ + (C-1) sigma-`` and
  ``omega = n - [B + sum D_i + (A+C)/2]``;
* odd: ``lambda = sum (D_i - 1) lambda_i + (A-1) sigma`` and
  ``omega = (2n+1)/2 - [B + sum D_i + A/2]``.

An operator between (lambda, omega) and (lambda', omega') has order omega' - omega.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .scalars import as_scalar, fmt_rational

__all__ = [
    "WeightRecord",
    "TableRow",
    "IntertwinerSpec",
    "lambda_omega",
    "soucek_table_row",
    "soucek_table",
    "table_columns",
    "integer_spin_instance",
    "half_integer_instance",
    "intertwiner_spec",
    "intertwiner_from_weights",
    "chirality_swap",
]


def _q(x):
    # keep mpq throughout: plain ints would turn halves into floats
    return mpq(as_scalar(x))


def _fmt(x):
    return fmt_rational(_q(x))


@dataclass(frozen=True)
class WeightRecord:
    m: int
    B: object
    D: tuple
    A: object
    C: object  # None in odd dimension
    lam: tuple
    omega: object

    @property
    def parity(self):
        return "even" if self.m % 2 == 0 else "odd"

    def to_json(self):
        out = {
            "m": self.m,
            "m_parity": self.parity,
            "B": _fmt(self.B),
            "D": [_fmt(d) for d in self.D],
            "A": _fmt(self.A),
            "lambda": [_fmt(x) for x in self.lam],
            "omega": _fmt(self.omega),
        }
        if self.C is not None:
            out["C"] = _fmt(self.C)
        return out


def _rank(m):
    if not isinstance(m, int) or m < 4:
        raise ValueError("need an integer dimension m >= 4")
    return m // 2


def lambda_omega(m: int, B, D, A, C=None) -> WeightRecord:
    """Highest weight and conformal weight from the tuple (B, D_i, A[, C])."""
    n = _rank(m)
    D = tuple(_q(d) for d in D)
    B, A = _q(B), _q(A)
    lam = [mpq(0)] * n
    if m % 2 == 0:
        if C is None:
            raise ValueError("even dimension needs C")
        if len(D) != n - 2:
            raise ValueError(f"even m = {m} needs {n - 2} D entries, got {len(D)}")
        C = _q(C)
        for i, d in enumerate(D, start=1):
            for t in range(i):
                lam[t] += d - 1
        half = mpq(1, 2)
        for t in range(n):
            lam[t] += (A - 1) * half
            lam[t] += (C - 1) * (half if t < n - 1 else -half)
        omega = n - (B + sum(D, mpq(0)) + (A + C) / 2)
    else:
        if C is not None:
            raise ValueError("odd dimension takes no C entry")
        if len(D) != n - 1:
            raise ValueError(f"odd m = {m} needs {n - 1} D entries, got {len(D)}")
        for i, d in enumerate(D, start=1):
            for t in range(i):
                lam[t] += d - 1
        for t in range(n):
            lam[t] += (A - 1) * mpq(1, 2)
        omega = mpq(2 * n + 1, 2) - (B + sum(D, mpq(0)) + A / 2)
    return WeightRecord(m, B, D, A, C, tuple(lam), omega)


def chirality_swap(lam):
    """Negate the last entry: sigma+ <-> sigma- exchange in even dimension."""
    return tuple(lam[:-1]) + (-lam[-1],)


@dataclass
class TableRow:
    m: int
    column: int
    params: dict
    unprimed: WeightRecord
    primed: WeightRecord
    flags: list = field(default_factory=list)

    @property
    def order(self):
        return self.primed.omega - self.unprimed.omega

    @property
    def lambda_equal(self):
        return self.unprimed.lam == self.primed.lam

    def to_json(self):
        return {
            "m": self.m,
            "column": self.column,
            "params": {k: ([_fmt(x) for x in v] if isinstance(v, (list, tuple)) else _fmt(v)) for k, v in self.params.items()},
            "unprimed": self.unprimed.to_json(),
            "primed": self.primed.to_json(),
            "order": _fmt(self.order),
            "lambda_equal": self.lambda_equal,
            "flags": list(self.flags),
        }


def table_columns(m: int) -> int:
    """Number of columns: first, one per D entry (merge columns), last."""
    n = _rank(m)
    return (n - 2 if m % 2 == 0 else n - 1) + 2


def _check_params(m, a, b, c, ds):
    vals = [a, b] + list(ds) + ([c] if m % 2 == 0 else [])
    for v in vals:
        if v < 0:
            raise ValueError("table parameters must be nonnegative")
    if m % 2 == 0:
        if any(v.denominator != 1 for v in vals):
            raise ValueError("even-dimensional table parameters must be integers")
    else:
        if any((2 * v).denominator != 1 for v in vals):
            raise ValueError("odd-dimensional table parameters must be integers or half-integers")
        if all(v.denominator == 1 for v in vals):
            raise ValueError("odd-dimensional table needs at least one half-integral parameter")


def soucek_table_row(m: int, column: int, a, b, c=0, d=(), check_domain=True) -> TableRow:
    """Tuples (B, D_i, A, C) and (B', D_i', A', C') for one table column.

    Columns run 0 .. table_columns(m)-1: column 0 is the first, column p
    (1 <= p <= number of D entries) merges d_(q-1) + d_q into D_q with
    q = (number of D entries) + 1 - p, and the last column has B = b.
    ``d_0`` stands for b.  The odd table is encoded as printed: e = a + b + d
    (no c) and, in the first column, A = a + d_(n-2).
    """
    n = _rank(m)
    even = m % 2 == 0
    nd = n - 2 if even else n - 1
    a, b, c = _q(a), _q(b), _q(c)
    ds = [_q(x) for x in d]
    if len(ds) != nd:
        raise ValueError(f"m = {m} needs {nd} parameters d_i, got {len(ds)}")
    if not 0 <= column < nd + 2:
        raise ValueError(f"column must be in 0..{nd + 1}")
    if check_domain:
        _check_params(m, a, b, c, ds)
    flags = []
    dsum = sum(ds, mpq(0))
    if even:
        e = a + b + c + dsum
    else:
        e = a + b + dsum
        if c:
            flags.append("odd table ignores c: e = a + b + d")
    dd = [b] + ds  # dd[i] = d_i with d_0 = b
    if column == 0:
        B, Bp = -b - dsum, -e
        D = [dd[i - 1] for i in range(1, nd + 1)]
        if even:
            extra = ds[-1] if nd else mpq(0)
            A, C = a + extra, c + extra
        else:
            extra = dd[n - 2] if n >= 2 else mpq(0)
            A, C = a + extra, None
            flags.append("odd table first column uses A = a + d_(n-2) as printed")
    elif column == nd + 1:
        B, Bp = b, -e - dsum
        D = list(ds)
        A, C = a, (c if even else None)
    else:
        q = nd + 1 - column
        B = -b - sum(ds[: q - 1], mpq(0))
        Bp = -e - sum(ds[q - 1 :], mpq(0))
        D = [dd[i - 1] for i in range(1, q)] + [dd[q - 1] + dd[q]] + [dd[i] for i in range(q + 1, nd + 1)]
        A, C = a, (c if even else None)
    if even:
        un = lambda_omega(m, B, D, A, C)
        pr = lambda_omega(m, Bp, D, C, A)
    else:
        un = lambda_omega(m, B, D, A)
        pr = lambda_omega(m, Bp, D, A)
    params = {"a": a, "b": b, "d": ds, "e": e}
    if even:
        params["c"] = c
    return TableRow(m, column, params, un, pr, flags)


def soucek_table(m: int, a, b, c=0, d=(), check_domain=True):
    return [soucek_table_row(m, col, a, b, c, d, check_domain) for col in range(table_columns(m))]


def _spin_params(m, j):
    n = _rank(m)
    if m % 2:
        raise ValueError("instantiation is worked out for even m only")
    nd = n - 2
    if nd >= 1:
        return [j + 1] + [1] * (nd - 1)
    return []


def integer_spin_instance(m: int, j: int, b: int, check_domain=True) -> dict:
    """Last-column row realising lambda = (j, 0, ..., 0) in even dimension.

    For m >= 6: d_1 = j+1, d_i = 1, a = c = 1.  For m = 4 (no D entries) the
    spin goes into a = c = j+1.
    """
    ds = _spin_params(m, j)
    a = c = 1 if ds else j + 1
    row = soucek_table_row(m, table_columns(m) - 1, a, b, c, ds, check_domain=check_domain)
    n = m // 2
    return {
        "row": row,
        "expected": {"order": 2 * b + 2 * n + 2 * j - 2, "omega": 1 - b - j, "omega_prime": b + j + 2 * n - 1,
                     "lambda": tuple([mpq(j)] + [mpq(0)] * (n - 1))},
    }


def half_integer_instance(m: int, j: int, b: int, sign=+1) -> dict:
    """Last-column row with the tuple D_1 = j+1, D_i = 1, A = 1, C = 0 (or A = 0, C = 1).

    For m = 4 the spin goes into (a, c) = (j+1, j) or (j, j+1).  C = 0 lies
    outside the positive range of the tuple, so no domain check is applied.
    """
    ds = _spin_params(m, j)
    if ds:
        a, c = (1, 0) if sign > 0 else (0, 1)
    else:
        a, c = (j + 1, j) if sign > 0 else (j, j + 1)
    row = soucek_table_row(m, table_columns(m) - 1, a, b, c, ds, check_domain=False)
    n = m // 2
    half = mpq(1, 2)
    return {
        "row": row,
        "expected": {"order": 2 * j + 2 * n + 2 * b - 3, "omega": -b - j + mpq(3, 2), "omega_prime": j + 2 * n + b - mpq(3, 2),
                     "lambda": tuple([j + half] + [half] * (n - 2) + [sign * half])},
    }


@dataclass(frozen=True)
class IntertwinerSpec:
    """Weight factors ``J_k`` (right) and ``J_-k`` (left) of the intertwining relation.

    Exponents are affine in m: ``(coefficient of m, constant)``; the factor is
    ``||cx+d||^e`` times ``(cx+d)~`` when ``vector_factor``.
    """

    k: int
    vector_factor: bool
    exp_in: tuple
    exp_out: tuple

    def exponents(self, m):
        return (self.exp_in[0] * m + self.exp_in[1], self.exp_out[0] * m + self.exp_out[1])

    def describe(self):
        def aff(e):
            cm, c0 = e
            sm = "-m" if cm == -1 else "m"
            return f"{c0}{sm if c0 == 0 else ('+' + sm if cm > 0 else sm)}" if c0 else sm

        v = "(cx+d)~ " if self.vector_factor else ""
        return f"J_{self.k} = {v}||cx+d||^({aff(self.exp_in)}), J_-{self.k} = {v}||cx+d||^({aff(self.exp_out)})"

    def to_json(self):
        return {"k": self.k, "vector_factor": self.vector_factor, "exp_in": list(self.exp_in), "exp_out": list(self.exp_out),
                "describe": self.describe()}


def intertwiner_spec(k: int) -> IntertwinerSpec:
    """Even k = 2s: ||cx+d||^(2s-m) and ||cx+d||^(-m-2s).
    Odd k = 2s+1: (cx+d)~/||cx+d||^(m-2s) and (cx+d)~/||cx+d||^(m+2s+2)."""
    if not isinstance(k, int) or k < 1:
        raise ValueError("order k must be a positive integer")
    s = k // 2
    if k % 2 == 0:
        return IntertwinerSpec(k, False, (-1, 2 * s), (-1, -2 * s))
    return IntertwinerSpec(k, True, (-1, 2 * s), (-1, -2 * s - 2))


def intertwiner_from_weights(m: int, omega, omega_prime, vector_factor: bool):
    """Exponents of ||cx+d|| implied by ||cx+d||^(-2 omega) rho(unit vector)."""
    e_in, e_out = -2 * _q(omega), -2 * _q(omega_prime)
    if vector_factor:
        e_in, e_out = e_in - 1, e_out - 1
    return e_in, e_out
