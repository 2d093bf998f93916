"""Polynomials on the unit sphere: integration, Fischer pairing, bases, zonal kernels.

All integrals are normalized by the sphere area, so every value stays rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .clifford import Multivector, primitive_idempotent
from .fields import RadialField, builtin, _compositions
from .linalg import nullspace, rank
from .scalars import I as IMAG
from .scalars import Q, div

__all__ = [
    "NormalizedSphereScalar",
    "PolySpaceBasis",
    "sphere_integrate",
    "integrate_u",
    "fischer_dagger",
    "fischer_inner",
    "basis_H",
    "basis_M",
    "almansi_project",
    "projection_P",
    "rarita_schwinger",
    "zonal_harmonic",
    "zonal_monogenic",
    "zonal_metadata",
    "highest_weight_vectors",
    "sphere_area",
    "module_rank",
]


def sphere_area(m: int) -> float:
    """Surface area of S^(m-1), only for display."""
    return 2 * math.pi ** (m / 2) / math.gamma(m / 2)


@dataclass(frozen=True)
class NormalizedSphereScalar:
    """An integral divided by the sphere area; ``value * area`` is the raw integral."""

    m: int
    value: Multivector

    def denormalized(self) -> str:
        return f"({self.value.to_latex()})\\,\\omega_{{{self.m - 1}}}"

    def approx(self) -> float:
        s = self.value.scalar_part()
        return float(s) * sphere_area(self.m)


def _double_factorial_odd(n):
    # (n-1)!! for even n >= 0
    out = 1
    for k in range(n - 1, 0, -2):
        out *= k
    return out


def _moment(m, beta):
    if any(b % 2 for b in beta):
        return 0
    num = 1
    for b in beta:
        num *= _double_factorial_odd(b)
    den = 1
    for l in range(sum(beta) // 2):
        den *= m + 2 * l
    return Q(num, den)


def integrate_u(f: RadialField) -> RadialField:
    """Normalized integral over u in S^(m-1); v stays symbolic."""
    m = f.dim
    if f.depends_on_x():
        raise ValueError("sphere integration needs a field without x or |x| dependence")
    out = RadialField.zero(m)
    for key, coeff in f.coefficient_map().items():
        w = _moment(m, key[m : 2 * m])
        if w:
            k = key[:m] + (0,) * m + key[2 * m :]
            out = out + RadialField(m, {k: {b: c * w for b, c in coeff.items()}})
    return out


def sphere_integrate(f: RadialField) -> NormalizedSphereScalar:
    g = integrate_u(f)
    m = f.dim
    if any(g.v_degrees() - {0}):
        raise ValueError("integrand still depends on v; use integrate_u")
    return NormalizedSphereScalar(m, g.constant_term())


def fischer_dagger(f: RadialField) -> RadialField:
    """Complex conjugate of the Clifford conjugate, coefficientwise."""
    return f.map_coefficients(lambda c: c.clifford_conjugate().complex_conjugate())


def fischer_inner(f: RadialField, g: RadialField, dagger=fischer_dagger):
    """Normalized integral of ``dagger(f) * g`` over the sphere.

    Returns a Multivector, or a RadialField in v when either argument depends on v.
    """
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    h = integrate_u(dagger(f) * g)
    if h.v_degrees() - {0}:
        return h
    return h.constant_term()


@dataclass
class PolySpaceBasis:
    space: str
    m: int
    j: int
    elements: list = field(default_factory=list)
    clifford_dim: int | None = None

    @property
    def dim(self):
        return len(self.elements)

    def to_json(self):
        return {
            "space": self.space,
            "m": self.m,
            "j": self.j,
            "dim": self.dim,
            "elements": [e.to_json() for e in self.elements],
        }


def _u_monomial(m, beta, coeff=1):
    return RadialField.monomial(m, None, beta, None, 0, coeff)


def basis_H(m: int, j: int) -> PolySpaceBasis:
    """Complex-valued j-homogeneous harmonic polynomials in u (kernel of the u-Laplacian)."""
    if j < 0:
        raise ValueError("degree must be nonnegative")
    src = list(_compositions(j, m))
    if j < 2:
        elems = [_u_monomial(m, b) for b in src]
        return PolySpaceBasis("H", m, j, elems)
    tgt = {b: i for i, b in enumerate(_compositions(j - 2, m))}
    rows = [[0] * len(src) for _ in tgt]
    for c, b in enumerate(src):
        for i in range(m):
            if b[i] >= 2:
                bb = list(b)
                bb[i] -= 2
                rows[tgt[tuple(bb)]][c] += b[i] * (b[i] - 1)
    elems = []
    for vec in nullspace(rows, len(src)):
        f = RadialField.zero(m)
        for c, w in enumerate(vec):
            if w:
                f = f + _u_monomial(m, src[c], w)
        elems.append(f)
    return PolySpaceBasis("H", m, j, elems)


def basis_M(m: int, j: int) -> PolySpaceBasis:
    """Right Cl_m-module basis of Clifford-valued j-homogeneous monogenics in u.

    For j = 1 this is ``{e_s u_m + e_m u_s}``; in general each element is the
    Cauchy-Kovalevskaya extension of a monomial in u_1..u_(m-1), right-multiplied
    by ``e_m``, which reproduces the j = 1 family exactly.
    """
    if j < 0:
        raise ValueError("degree must be nonnegative")
    if m < 2:
        raise ValueError("need m >= 2")
    if j == 0:
        return PolySpaceBasis("M", m, 0, [RadialField.const(m, 1)])
    em = Multivector.basis(m, m)
    dprime = None
    for i in range(1, m):
        t = builtin("deriv_u", m, i).scale(Multivector.basis(m, i))
        dprime = t if dprime is None else dprime + t
    step = builtin("mult_const", m, em) @ dprime
    elems = []
    for beta in _compositions(j, m - 1):
        p = _u_monomial(m, tuple(beta) + (0,))
        total = RadialField.zero(m)
        term = p
        for k in range(j + 1):
            if term.is_zero():
                break
            total = total + (RadialField.u(m, m, k) * term) / math.factorial(k)
            term = step(term)
        elems.append(total.right(em))
    return PolySpaceBasis("M", m, j, elems)


def projection_P(m: int, j: int):
    """The Almansi-Fischer projection ``u D_u/(m+2j-2) + 1`` as an operator."""
    uDu = builtin("mult_vector_u", m) @ builtin("dirac_u", m)
    return uDu.scale(Q(1, m + 2 * j - 2)) + builtin("identity", m)


def almansi_project(h: RadialField, m: int, j: int):
    """Split an H_j-valued field as ``h = p_j + u p_(j-1)`` with both parts monogenic."""
    if h.dim != m:
        raise ValueError("dimension mismatch")
    if j < 1:
        raise ValueError("need j >= 1")
    if not h.is_zero():
        if h.u_degrees() != {j}:
            raise ValueError(f"input is not homogeneous of degree {j} in u")
        if not builtin("laplace_u", m)(h).is_zero():
            raise ValueError("input is not harmonic in u")
    pj = projection_P(m, j)(h)
    pjm1 = builtin("dirac_u", m)(h) * Q(-1, m + 2 * j - 2)
    return pj, pjm1


def rarita_schwinger(m: int, j: int = 1):
    op = projection_P(m, j) @ builtin("dirac_x", m)
    op.descriptor = f"R_{j}"
    return op


def zonal_harmonic(m: int) -> RadialField:
    """Normalized reproducing kernel of H_1: ``m <u, v>``."""
    if m < 3:
        raise ValueError("need m >= 3")
    return RadialField.inner(m, "u", "v") * m


def zonal_monogenic(m: int) -> RadialField:
    """Normalized reproducing kernel of M_1 from the Gegenbauer form.

    With mu = m/2 - 1, ``(2mu+1)/(2mu) C_1^mu(t) + (u^v) C_0^(mu+1)(t)`` and
    ``u^v = uv + <u,v>`` expands to ``m <u,v> + uv``; the constant is 1.
    """
    if m < 3:
        raise ValueError("need m >= 3")
    mu = Q(m, 2) - 1
    t = RadialField.inner(m, "u", "v")
    c1 = t * (2 * mu)  # C_1^mu(t)
    wedge = RadialField.vector_u(m) * RadialField.vector_v(m) + t
    gegen = c1 * div(2 * mu + 1, 2 * mu) + wedge  # C_0^(mu+1) = 1
    return gegen * ZONAL_MONOGENIC_CONSTANT


ZONAL_HARMONIC_CONSTANT = "m"
ZONAL_MONOGENIC_CONSTANT = 1


def zonal_metadata(m: int) -> dict:
    """Normalization record; the printed textbook constant is kept for reference only."""
    return {
        "m": m,
        "harmonic_constant": m,
        "monogenic_constant": ZONAL_MONOGENIC_CONSTANT,
        "normalization": "integrals divided by the area of S^(m-1)",
        "reference_harmonic_constant": f"(m-2)^2 omega_(m-1)/m = {Q((m - 2) ** 2, m)} * omega_{m - 1}",
        "reference_constant_reproduces": False,
    }


def highest_weight_vectors(m: int, j: int):
    """``((u_1 + i u_m)^j, (u_1 - i u_2)^j I)``.

    For odd m the idempotent lives in Cl_(m+1)(C) and the second field has
    dimension m+1 (it does not depend on u_(m+1)).
    """
    if m < 3:
        raise ValueError("need m >= 3")
    if j < 0:
        raise ValueError("degree must be nonnegative")
    hwv_h = (RadialField.u(m, 1) + RadialField.u(m, m) * IMAG) ** j
    mm = m if m % 2 == 0 else m + 1
    idem = primitive_idempotent(mm, "adjacent")
    hwv_m = ((RadialField.u(mm, 1) - RadialField.u(mm, 2) * IMAG) ** j).right(idem)
    return hwv_h, hwv_m


def module_rank(elements, m):
    """Rank of Clifford-valued fields as a right Cl_m-module (via the real span of e_A-multiples)."""
    rows = []
    keys = {}
    vecs = []
    for e in elements:
        for blade in range(1 << m):
            g = e.right(Multivector._raw(m, {blade: 1}))
            vecs.append(g)
            for k in g.terms:
                keys.setdefault(k, len(keys))
    for g in vecs:
        row = [0] * len(keys)
        for k, val in g.terms.items():
            row[keys[k]] = val
        rows.append(row)
    return rank(rows) // (1 << m) if rows else 0
