"""Higher order bosonic and fermionic operators and their conformal symmetries.

``build_bosonic(m, n)`` gives the order-2n operator on H_1-valued fields and
``build_fermionic(m, n)`` the order-(2n-1) operator on M_1-valued fields.  The
``verify_*`` functions check the commutator lemmas, generalized symmetries,
inversion conjugation and rotation intertwining on monomial sweeps, returning
:class:`~cliffspin.report.Report` objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .clifford import Multivector, VersorProduct
from .fields import LinOperator, RadialField, builtin, commutator, identity, inversion_operator, power, spin_substitution_operator, sweep_fields
from .linalg import independent_subset, solve
from .report import Report, check_operator
from .scalars import Q, fmt_rational
from .sphere import PolySpaceBasis, basis_H, basis_M, rarita_schwinger

__all__ = [
    "HigherSpinOperator",
    "build_bosonic",
    "build_fermionic",
    "build_operator",
    "maxwell_operator",
    "inversion_J",
    "sct_C",
    "sct_conjugation",
    "rotation_generator",
    "symmetry_generators",
    "lemma_residuals",
    "verify_commutator_lemmas",
    "verify_generalized_symmetry",
    "verify_lie_closure",
    "verify_inversion_conjugation",
    "verify_inversion_square",
    "verify_orthogonal_intertwining",
    "verify_reductions",
    "target_basis",
    "default_sweep",
]


@dataclass(frozen=True)
class HigherSpinOperator:
    m: int
    k: int
    parity: str  # "even" (bosonic) or "odd" (fermionic)
    op: LinOperator
    target: PolySpaceBasis

    @property
    def n(self):
        return self.k // 2 if self.parity == "even" else (self.k + 1) // 2

    def __call__(self, f):
        return self.op(f)


class _Blocks:
    """Shared building blocks for one dimension so memoized images are reused."""

    def __init__(self, m):
        self.m = m
        self.lap = builtin("laplace_x", m)
        self.dx = builtin("dirac_x", m)
        self.u_dx = builtin("inner_u_Dx", m)
        self.du_dx = builtin("inner_Du_Dx", m)
        self.x_du = builtin("inner_x_Du", m)
        self.ux = builtin("mult_inner_ux", m)
        self.uvec = builtin("mult_vector_u", m)
        self.xvec = builtin("mult_vector_x", m)
        self.normsq = builtin("mult_normsq", m)
        self.euler = builtin("euler_x", m)
        self.one = identity(m)
        self._lap_pow = {0: self.one, 1: self.lap}
        self._cache = {}

    def lap_pow(self, n):
        if n < 0:
            raise ValueError("negative Laplacian power")
        if n not in self._lap_pow:
            self._lap_pow[n] = self.lap @ self.lap_pow(n - 1)
            self._lap_pow[n].descriptor = ("^", "Lap_x", n)
        return self._lap_pow[n]

    def get(self, name, fn):
        if name not in self._cache:
            self._cache[name] = fn()
        return self._cache[name]

    def deriv_x(self, j):
        return self.get(("dx", j), lambda: builtin("deriv_x", self.m, j))

    def deriv_u(self, j):
        return self.get(("du", j), lambda: builtin("deriv_u", self.m, j))

    def xj(self, j):
        return self.get(("xj", j), lambda: builtin("mult_xj", self.m, j))

    def uj(self, j):
        return self.get(("uj", j), lambda: builtin("mult_uj", self.m, j))

    def ej(self, j):
        return self.get(("ej", j), lambda: builtin("mult_ej", self.m, j))

    def even_tail(self, n):
        """<u,D_x><D_u,D_x> Lap^(n-1)."""
        return self.get(("A", n), lambda: self.u_dx @ (self.du_dx @ self.lap_pow(n - 1)))

    def odd_t1(self, n):
        return self.get(("T1", n), lambda: self.dx @ self.lap_pow(n - 1))

    def odd_t2(self, n):
        """u <D_u,D_x> Lap^(n-1)."""
        return self.get(("T2", n), lambda: self.uvec @ (self.du_dx @ self.lap_pow(n - 1)))

    def odd_t3(self, n):
        """<u,D_x><D_u,D_x> Lap^(n-2) D_x."""
        return self.get(("T3", n), lambda: self.u_dx @ (self.du_dx @ (self.lap_pow(n - 2) @ self.dx)))


@lru_cache(maxsize=None)
def blocks(m) -> _Blocks:
    return _Blocks(m)


def _check_mn(m, n):
    if not isinstance(m, int) or m < 3:
        raise ValueError("dimension m must be an integer >= 3")
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")


def target_basis(m, k):
    return basis_H(m, 1) if k % 2 == 0 else basis_M(m, 1)


@lru_cache(maxsize=None)
def build_bosonic(m: int, n: int, perturb=0) -> HigherSpinOperator:
    """Lap^n - 4n/(m+2n-2) <u,D_x><D_u,D_x> Lap^(n-1); ``perturb`` shifts the coefficient."""
    _check_mn(m, n)
    b = blocks(m)
    c = Q(4 * n, m + 2 * n - 2) + perturb
    op = b.lap_pow(n) - b.even_tail(n).scale(c)
    op.descriptor = f"D_(1,{2 * n})" + (f"[perturbed {perturb}]" if perturb else "")
    return HigherSpinOperator(m, 2 * n, "even", op, basis_H(m, 1))


@lru_cache(maxsize=None)
def build_fermionic(m: int, n: int, perturb=0) -> HigherSpinOperator:
    """D_x Lap^(n-1) - 2/(m+2n-2) u<D_u,D_x>Lap^(n-1) - (4n-4)/(m+2n-2) <u,D_x><D_u,D_x>Lap^(n-2)D_x."""
    _check_mn(m, n)
    b = blocks(m)
    c1 = Q(2, m + 2 * n - 2) + perturb
    op = b.odd_t1(n) - b.odd_t2(n).scale(c1)
    if n >= 2:
        op = op - b.odd_t3(n).scale(Q(4 * n - 4, m + 2 * n - 2))
    op.descriptor = f"D_(1,{2 * n - 1})" + (f"[perturbed {perturb}]" if perturb else "")
    return HigherSpinOperator(m, 2 * n - 1, "odd", op, basis_M(m, 1))


def build_operator(m: int, k: int, perturb=0) -> HigherSpinOperator:
    if k < 1:
        raise ValueError("order k must be >= 1")
    return build_bosonic(m, k // 2, perturb) if k % 2 == 0 else build_fermionic(m, (k + 1) // 2, perturb)


def maxwell_operator(m: int) -> LinOperator:
    """Second order spin-1 operator from coordinate derivatives:
    sum_i d_i^2 - (4/m) sum_{i,l} u_i d_{x_i} d_{u_l} d_{x_l}."""
    lap = None
    for i in range(1, m + 1):
        d = builtin("deriv_x", m, i)
        t = d @ d
        lap = t if lap is None else lap + t
    grad = None
    for i in range(1, m + 1):
        for l in range(1, m + 1):
            t = builtin("mult_uj", m, i) @ builtin("deriv_x", m, i) @ builtin("deriv_u", m, l) @ builtin("deriv_x", m, l)
            grad = t if grad is None else grad + t
    op = lap - grad.scale(Q(4, m))
    op.descriptor = "Maxwell"
    return op


def _inv_weight(m, k):
    return (k - m, False) if k % 2 == 0 else (k - 1 - m, True)


@lru_cache(maxsize=None)
def inversion_J(m: int, k: int) -> LinOperator:
    """Harmonic (k even) or monogenic (k odd) inversion of weight matching order k."""
    w, vec = _inv_weight(m, k)
    op = inversion_operator(m, w, vec)
    op.descriptor = f"J_{k}"
    return op


@lru_cache(maxsize=None)
def sct_C(m: int, k: int, j: int) -> LinOperator:
    """Closed form of the special conformal transformation in direction j."""
    if not 1 <= j <= m:
        raise ValueError(f"direction {j} out of range")
    b = blocks(m)
    n = k // 2 if k % 2 == 0 else (k + 1) // 2
    weight = b.euler.scale(2) + b.one.scale(m - 2 * n)
    even_part = (
        (b.ux @ b.deriv_u(j)).scale(2)
        - (b.uj(j) @ b.x_du).scale(2)
        + b.normsq @ b.deriv_x(j)
        - b.xj(j) @ weight
    )
    if k % 2 == 0:
        op = even_part
    else:
        op = -(b.ej(j) @ b.xvec) - even_part
    op.descriptor = f"C_{k}^({j})"
    return op


def sct_conjugation(m: int, k: int, j: int) -> LinOperator:
    """J_k d_{x_j} J_k, computed by substitution."""
    J = inversion_J(m, k)
    op = J @ (blocks(m).deriv_x(j) @ J)
    op.descriptor = f"J_{k} d_{j} J_{k}"
    return op


def rotation_generator(m: int, i: int, j: int, parity: str) -> LinOperator:
    """L^x_ij + L^u_ij, plus the spin term -e_i e_j/2 on Clifford-valued (odd) targets."""
    op = builtin("angular_x", m, i, j) + builtin("angular_u", m, i, j)
    if parity == "odd":
        op = op + builtin("mult_const", m, Multivector.blade(m, (i, j), Q(-1, 2)))
    op.descriptor = f"L_{i}{j}"
    return op


def symmetry_generators(m: int, k: int):
    """Named first order symmetries: translations, shifted Euler, rotations, SCTs."""
    parity = "even" if k % 2 == 0 else "odd"
    gens = []
    for j in range(1, m + 1):
        gens.append((f"d_{j}", blocks(m).deriv_x(j)))
    gens.append(("E+w", blocks(m).euler + identity(m).scale(Q(m - k, 2))))
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            gens.append((f"L_{i}{j}", rotation_generator(m, i, j, parity)))
    for j in range(1, m + 1):
        gens.append((f"C_{j}", sct_C(m, k, j)))
    return gens


def default_sweep(m, k, bound=None, basis=None):
    if bound is None:
        bound = k + 2
    if basis is None:
        basis = target_basis(m, k)
    return sweep_fields(m, bound, basis.elements)


# ---------------------------------------------------------------------------
# lemma-level identities


def lemma_residuals(m: int, n: int, j: int, parity: str, include_printed=True):
    """Map lemma name -> residual operator (LHS - RHS)."""
    b = blocks(m)
    L = b.lap_pow
    xj, uj, du_j, ej = b.xj(j), b.uj(j), b.deriv_u(j), b.ej(j)
    out = {}
    if parity == "even":
        C = sct_C(m, 2 * n, j)
        rhs1 = (
            (xj @ L(n)).scale(-4 * n)
            + (b.u_dx @ (du_j @ L(n - 1))).scale(4 * n)
            - (uj @ (b.du_dx @ L(n - 1))).scale(4 * n)
        )
        out["even_lemma_laplace_power"] = commutator(L(n), C) - rhs1
        A = b.even_tail(n)
        rhs2 = (xj @ A).scale(-4 * n) + ((b.u_dx @ du_j - uj @ b.du_dx) @ L(n - 1)).scale(m + 2 * n - 2)
        out["even_lemma_gradient_term"] = commutator(A, C) - rhs2
        return out

    C = sct_C(m, 2 * n - 1, j)
    T1 = b.odd_t1(n)
    rhs5 = (xj @ T1).scale(4 * n - 2) - (b.uvec @ (du_j @ L(n - 1))).scale(2)
    if n >= 2:
        rhs5 = rhs5 + ((uj @ b.du_dx - b.u_dx @ du_j) @ (b.dx @ L(n - 2))).scale(4 * n - 4)
    out["odd_lemma_dirac_power"] = commutator(T1, C) - rhs5

    T2 = b.odd_t2(n)
    base6 = (xj @ T2).scale(4 * n - 2) - (b.uvec @ (du_j @ L(n - 1))).scale(m + 2 * n - 2)
    lhs6 = commutator(T2, C)
    if n >= 2:
        tail_corrected = b.uvec @ (ej @ (b.du_dx @ (L(n - 2) @ b.dx)))
        out["odd_lemma_vector_term"] = lhs6 - (base6 - tail_corrected.scale(2 * n - 2))
        if include_printed:
            tail_printed = b.uvec @ (ej @ (b.du_dx @ L(n - 2)))
            out["odd_lemma_vector_term_as_printed"] = lhs6 - (base6 - tail_printed.scale(2 * n - 2))
    else:
        out["odd_lemma_vector_term"] = lhs6 - base6

    if n >= 2:
        T3 = b.odd_t3(n)
        tail = L(n - 2) @ b.dx
        rhs7 = (
            (xj @ T3).scale(4 * n - 2)
            - ((b.u_dx @ du_j - uj @ b.du_dx) @ tail).scale(m + 2 * n - 2)
            + b.uvec @ (ej @ (b.du_dx @ tail))
        )
        out["odd_lemma_third_term"] = commutator(T3, C) - rhs7
    return out


# identities whose printed form is known not to hold; they are reported, not failed
PRINTED_FORM_IDENTITIES = {"odd_lemma_vector_term_as_printed"}


def verify_commutator_lemmas(m, n, parity, j=None, bound=None, sweep=None, include_printed=False):
    k = 2 * n if parity == "even" else 2 * n - 1
    sweep = sweep if sweep is not None else default_sweep(m, k, bound)
    reports = []
    for jj in [j] if j is not None else range(1, m + 1):
        for name, op in lemma_residuals(m, n, jj, parity, include_printed).items():
            reports.append(check_operator(name, {"m": m, "n": n, "k": k, "j": jj}, op, sweep))
    return reports


# ---------------------------------------------------------------------------
# operator-level symmetries


def verify_generalized_symmetry(m, n, parity, bound=None, sweep=None, perturb=0, families=None):
    """SCT commutator relation, translations, rotations and the Euler relation."""
    D = build_bosonic(m, n, perturb) if parity == "even" else build_fermionic(m, n, perturb)
    k = D.k
    sweep = sweep if sweep is not None else default_sweep(m, k, bound)
    b = blocks(m)
    params = {"m": m, "n": n, "k": k}
    families = families or ("sct", "translation", "rotation", "euler")
    reports = []
    if "sct" in families:
        factor = -4 * n if parity == "even" else 4 * n - 2
        for j in range(1, m + 1):
            res = commutator(D.op, sct_C(m, k, j)) - (b.xj(j) @ D.op).scale(factor)
            reports.append(check_operator("sct_generalized_symmetry", dict(params, j=j), res, sweep))
    if "translation" in families:
        for j in range(1, m + 1):
            reports.append(check_operator("translation", dict(params, j=j), commutator(D.op, b.deriv_x(j)), sweep))
    if "rotation" in families:
        for i in range(1, m + 1):
            for j in range(i + 1, m + 1):
                res = commutator(D.op, rotation_generator(m, i, j, parity))
                reports.append(check_operator("rotation", dict(params, i=i, j=j), res, sweep))
    if "euler" in families:
        res = D.op @ b.euler - (b.euler + b.one.scale(k)) @ D.op
        reports.append(check_operator("euler", params, res, sweep))
    return reports


def _vectorize(fields):
    index = {}
    rows = []
    for f in fields:
        row = {}
        for code, c in f.terms.items():
            row[index.setdefault(code, len(index))] = c
        rows.append(row)
    return rows, index


def verify_lie_closure(m, k, bound=2):
    """Brackets of the symmetry generators lie in their span; structure constants solved exactly.

    The check runs on all fields x^a * b with |a| <= bound and b in the target basis.
    """
    gens = symmetry_generators(m, k)
    sweep = [f for _, f in default_sweep(m, k, bound)]
    images = [[g(f) for f in sweep] for _, g in gens]
    rep = Report("lie_closure", {"m": m, "k": k, "generators": len(gens), "sweep_bound": bound})
    ng, nf = len(gens), len(sweep)
    # the generators must be independent, otherwise the span count means nothing
    rows, _ = _vectorize([img for imgs in images for img in imgs])
    support = sorted({(fi, c) for g in range(ng) for fi in range(nf) for c in rows[g * nf + fi]})
    gen_vecs = [[rows[g * nf + fi].get(c, 0) for fi, c in support] for g in range(ng)]
    rep.notes["independent_generators"] = len(independent_subset(gen_vecs))
    constants = {}
    for a in range(ng):
        for c in range(a + 1, ng):
            ga, gc = gens[a][1], gens[c][1]
            br = [ga(images[c][fi]) - gc(images[a][fi]) for fi in range(nf)]
            rows, _ = _vectorize([img for imgs in images for img in imgs] + br)
            A, rhs = [], []
            for fi in range(nf):
                coords = set(rows[ng * nf + fi])
                for g in range(ng):
                    coords.update(rows[g * nf + fi])
                for col in sorted(coords):
                    A.append([rows[g * nf + fi].get(col, 0) for g in range(ng)])
                    rhs.append(rows[ng * nf + fi].get(col, 0))
            rep.fields_checked += nf
            sol = solve(A, rhs) if A else [0] * ng
            if sol is None:
                rep.residuals.append({"field": f"[{gens[a][0]}, {gens[c][0]}]", "residual": "not in span"})
                continue
            nz = {gens[g][0]: fmt_rational(v) for g, v in enumerate(sol) if v}
            if nz:
                constants[f"[{gens[a][0]},{gens[c][0]}]"] = nz
    rep.notes["structure_constants"] = constants
    rep.notes["expected_dimension"] = (m + 1) * (m + 2) // 2
    return rep


# ---------------------------------------------------------------------------
# inversion and rotations


def verify_inversion_square(m, k, bound=None, sweep=None):
    """J_k^2 = +1 (k even) or -1 (k odd) on the sweep."""
    J = inversion_J(m, k)
    sign = 1 if k % 2 == 0 else -1
    sweep = sweep if sweep is not None else default_sweep(m, k, bound)
    res = J @ J - identity(m).scale(sign)
    return check_operator("inversion_square", {"m": m, "k": k, "sign": sign}, res, sweep)


def verify_inversion_conjugation(m, n, parity, bound=None, sweep=None, perturb=0):
    """J D J = sign * |x|^(2k) D; the sign that holds is recorded in the report notes."""
    D = build_bosonic(m, n, perturb) if parity == "even" else build_fermionic(m, n, perturb)
    k = D.k
    J = inversion_J(m, k)
    sweep = sweep if sweep is not None else default_sweep(m, k, bound)
    conj = J @ (D.op @ J)
    r2k = builtin("mult_radial", m, 2 * k)
    expected_sign = 1
    rep = check_operator(
        "inversion_conjugation", {"m": m, "n": n, "k": k, "sign": expected_sign}, conj - (r2k @ D.op).scale(expected_sign), sweep
    )
    if not rep.ok:
        other = check_operator("inversion_conjugation", {}, conj + r2k @ D.op, sweep)
        rep.notes["opposite_sign_holds"] = other.ok
    return rep


def verify_orthogonal_intertwining(m, n, parity, s: VersorProduct, bound=None, sweep=None, perturb=0):
    """D commutes with f -> [s] f(s~ x s, s~ u s) (left factor s only on Clifford-valued targets)."""
    D = build_bosonic(m, n, perturb) if parity == "even" else build_fermionic(m, n, perturb)
    sweep = sweep if sweep is not None else default_sweep(m, D.k, bound)
    rho = spin_substitution_operator(m, s, twist_u=True, coefficient="left" if parity == "odd" else "none", inverse=True)
    return check_operator(
        "orthogonal_intertwining", {"m": m, "n": n, "k": D.k, "versor": [list(map(str, y)) for y in s.factors]}, commutator(D.op, rho), sweep
    )


def verify_reductions(m, bound=3):
    """Order-1 fermionic operator equals Rarita-Schwinger on M_1; order-2 bosonic equals Maxwell."""
    reps = []
    sw = sweep_fields(m, bound, basis_M(m, 1).elements)
    reps.append(check_operator("fermionic_n1_equals_rarita_schwinger", {"m": m}, build_fermionic(m, 1).op - rarita_schwinger(m, 1), sw))
    sw = sweep_fields(m, bound + 1, basis_H(m, 1).elements)
    reps.append(check_operator("bosonic_n1_equals_maxwell", {"m": m}, build_bosonic(m, 1).op - maxwell_operator(m), sw))
    return reps
