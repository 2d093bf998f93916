import itertools
from functools import lru_cache

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from cliffspin.clifford import Multivector, primitive_idempotent
from cliffspin.fields import RadialField, builtin
from cliffspin.scalars import I, Q
from cliffspin.sphere import (
    almansi_project,
    basis_H,
    basis_M,
    fischer_dagger,
    fischer_inner,
    highest_weight_vectors,
    integrate_u,
    module_rank,
    rarita_schwinger,
    sphere_integrate,
    zonal_harmonic,
    zonal_metadata,
    zonal_monogenic,
)


def umono(m, beta):
    return RadialField.monomial(m, None, beta)


def scalar_integral(f):
    return sphere_integrate(f).value.scalar_part()


@lru_cache(maxsize=None)
def s2_average(a, b, c):
    """Average of u1^a u2^b u3^c over S^2 by symbolic integration."""
    th, ph = sp.symbols("theta phi")
    u1, u2, u3 = sp.sin(th) * sp.cos(ph), sp.sin(th) * sp.sin(ph), sp.cos(th)
    val = sp.integrate(sp.integrate(u1**a * u2**b * u3**c * sp.sin(th), (ph, 0, 2 * sp.pi)), (th, 0, sp.pi))
    return sp.nsimplify(val / (4 * sp.pi))


# -- integration --------------------------------------------------------------


@pytest.mark.parametrize("m", [3, 4, 5, 8])
def test_moment_examples(m):
    assert scalar_integral(umono(m, [2] + [0] * (m - 1))) == Q(1, m)
    assert scalar_integral(umono(m, [1, 1] + [0] * (m - 2))) == 0
    assert scalar_integral(umono(m, [4] + [0] * (m - 1))) == Q(3, m * (m + 2))


@pytest.mark.parametrize("m", [3, 4, 6])
def test_moment_sums(m):
    total = sum(scalar_integral(umono(m, [2 if t == i else 0 for t in range(m)])) for i in range(m))
    assert total == 1
    total4 = 0
    for i, j in itertools.product(range(m), repeat=2):
        beta = [0] * m
        beta[i] += 2
        beta[j] += 2
        total4 += scalar_integral(umono(m, beta))
    assert total4 == 1


@pytest.mark.parametrize("beta", [(2, 0, 0), (4, 0, 0), (2, 2, 0), (2, 2, 2), (6, 0, 0), (4, 2, 0), (1, 1, 0), (3, 0, 1)])
def test_moments_match_symbolic_quadrature(beta):
    got = Q(scalar_integral(umono(3, list(beta))))
    assert sp.Rational(str(got)) == s2_average(*beta)


def test_integration_rejects_x_dependence():
    with pytest.raises(ValueError):
        integrate_u(RadialField.x(3, 1) * RadialField.u(3, 1))


@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
def test_rotation_invariance_of_moments(a, b, c):
    # the average of a monomial is symmetric in the variables
    m = 4
    vals = {scalar_integral(umono(m, list(p) + [0])) for p in itertools.permutations((a, b, c))}
    assert len(vals) == 1


# -- Fischer pairing ----------------------------------------------------------


def test_fischer_inner_examples():
    m = 4
    u1, u2 = RadialField.u(m, 1), RadialField.u(m, 2)
    assert fischer_inner(u1, u1) == Multivector.scalar(m, Q(1, m))
    assert fischer_inner(u1, u2).is_zero()
    f = u2.right(Multivector.basis(m, 1))
    # dagger(e1) e1 = (-e1) e1 = 1
    assert fischer_inner(f, f) == Multivector.scalar(m, Q(1, m))


def test_fischer_dagger_conjugates_complex_part():
    m = 3
    f = RadialField.u(m, 1).right(Multivector.basis(m, 2) * I)
    assert fischer_dagger(f) == RadialField.u(m, 1).right(Multivector.basis(m, 2) * I)
    g = RadialField.u(m, 1) * I
    assert fischer_dagger(g) == RadialField.u(m, 1) * I * -1


@pytest.mark.parametrize("m", [3, 4])
def test_fischer_inner_positive_on_basis_H2(m):
    for h in basis_H(m, 2).elements:
        assert fischer_inner(h, h).scalar_part() > 0


# -- bases --------------------------------------------------------------------


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_basis_H1_and_M1(m):
    H = basis_H(m, 1)
    assert H.dim == m
    assert H.elements == [RadialField.u(m, i) for i in range(1, m + 1)]
    M = basis_M(m, 1)
    assert M.dim == m - 1
    Du = builtin("dirac_u", m)
    for s, b in enumerate(M.elements, start=1):
        assert b == RadialField.u(m, m).right(Multivector.basis(m, s)) + RadialField.u(m, s).right(Multivector.basis(m, m))
        assert Du(b).is_zero()


@pytest.mark.parametrize("m,j,dim", [(4, 2, 9), (3, 2, 5), (3, 3, 7), (5, 2, 14), (4, 3, 16)])
def test_harmonic_dimensions(m, j, dim):
    # C(m+j-1, j) - C(m+j-3, j-2)
    B = basis_H(m, j)
    assert B.dim == dim
    lap = builtin("laplace_u", m)
    assert all(lap(h).is_zero() for h in B.elements)


@pytest.mark.parametrize("m,j", [(3, 1), (3, 2), (4, 2), (5, 1), (4, 3)])
def test_monogenic_module_rank(m, j):
    # rank over Cl_m equals C(m+j-2, j)
    from math import comb

    B = basis_M(m, j)
    Du = builtin("dirac_u", m)
    assert all(Du(p).is_zero() for p in B.elements)
    assert module_rank(B.elements, m) == comb(m + j - 2, j)


# -- Almansi-Fischer ----------------------------------------------------------


def test_almansi_monogenic_input():
    m = 4
    h = basis_M(m, 1).elements[0]
    p1, p0 = almansi_project(h, m, 1)
    assert p1 == h and p0.is_zero()


def test_almansi_u_times_constant():
    m = 4
    c = Multivector.blade(m, (1, 3), 2) + Multivector.scalar(m, 1)
    h = RadialField.vector_u(m).right(c)
    p1, p0 = almansi_project(h, m, 1)
    assert p1.is_zero()
    assert p0 == RadialField.const(m, c)


def test_almansi_worked_example():
    m = 3
    u1 = RadialField.u(m, 1)
    p1, p0 = almansi_project(u1, m, 1)
    uvec = RadialField.vector_u(m)
    assert p1 == u1 + uvec.right(Multivector.basis(m, 1)) * Q(1, 3)
    assert p0 == RadialField.const(m, Multivector.basis(m, 1) * Q(-1, 3))
    assert builtin("dirac_u", m)(p1).is_zero()
    assert p1 + uvec * p0 == u1
    assert builtin("dirac_u", m)(uvec * p0) == p0 * -m


@pytest.mark.parametrize("m", [3, 5])
def test_almansi_degree_two(m):
    uvec = RadialField.vector_u(m)
    Du = builtin("dirac_u", m)
    for h in basis_H(m, 2).elements[:4]:
        h = h.right(Multivector.basis(m, 1))
        p2, p1 = almansi_project(h, m, 2)
        assert Du(p2).is_zero() and Du(p1).is_zero()
        assert p2 + uvec * p1 == h


def test_almansi_rejects_non_harmonic():
    m = 3
    with pytest.raises(ValueError):
        almansi_project(RadialField.u(m, 1) ** 2, m, 2)
    with pytest.raises(ValueError):
        almansi_project(RadialField.u(m, 1) ** 2, m, 1)


# -- Rarita-Schwinger ---------------------------------------------------------


def test_rarita_schwinger_examples():
    m = 4
    R = rarita_schwinger(m, 1)
    b = basis_M(m, 1).elements[0]
    assert R(b).is_zero()
    out = R(RadialField.x(m, 1) * b)
    assert not out.is_zero()
    assert builtin("dirac_u", m)(out).is_zero()


# -- zonal kernels ------------------------------------------------------------


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7, 8])
def test_zonal_harmonic(m):
    Z = zonal_harmonic(m)
    assert builtin("laplace_u", m)(Z).is_zero()
    for i in range(1, m + 1):
        assert integrate_u(Z * RadialField.u(m, i)) == RadialField.v(m, i)
    # symmetric in (u, v)
    assert Z == RadialField.inner(m, "v", "u") * m


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_zonal_monogenic(m):
    Z = zonal_monogenic(m)
    assert builtin("dirac_u", m)(Z).is_zero()
    em, e1 = Multivector.basis(m, m), Multivector.basis(m, 1)
    P = RadialField.u(m, m).right(e1) + RadialField.u(m, 1).right(em)
    want = RadialField.v(m, m).right(e1) + RadialField.v(m, 1).right(em)
    assert integrate_u(fischer_dagger(Z) * P) == want
    # the undaggered product does not reproduce
    assert integrate_u(Z * P) != want


def test_zonal_monogenic_expansion():
    m = 4
    want = RadialField.inner(m, "u", "v") * m + RadialField.vector_u(m) * RadialField.vector_v(m)
    assert zonal_monogenic(m) == want
    # mu = 1: (2mu+1)/(2mu) C_1^mu(t) = 3t
    t = RadialField.inner(m, "u", "v")
    assert t * 2 * Q(3, 2) == t * 3


def test_zonal_constants_golden():
    meta = zonal_metadata(5)
    assert meta["harmonic_constant"] == 5
    assert meta["monogenic_constant"] == 1
    assert meta["reference_constant_reproduces"] is False


# -- highest weight vectors ---------------------------------------------------


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_highest_weight_vectors(m):
    for j in range(4):
        h, p = highest_weight_vectors(m, j)
        assert builtin("laplace_u", m)(h).is_zero()
        assert builtin("dirac_u", p.dim)(p).is_zero()
    h0, p0 = highest_weight_vectors(m, 0)
    mm = m if m % 2 == 0 else m + 1
    assert h0 == RadialField.const(m, 1)
    assert p0 == RadialField.const(mm, primitive_idempotent(mm, "adjacent"))


def test_isotropic_square_is_harmonic():
    m = 3
    f = (RadialField.u(m, 1) + RadialField.u(m, m) * I) ** 2
    assert builtin("laplace_u", m)(f).is_zero()
