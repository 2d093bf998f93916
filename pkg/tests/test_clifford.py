import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from cliffspin.clifford import (
    Multivector,
    VersorProduct,
    blade_indices,
    geometric_product,
    grade_project,
    hermitian_dagger,
    primitive_idempotent,
    reflect_vector,
    reversion,
    spin_act,
    spinor_space,
    witt_frame,
)
from cliffspin.scalars import I, Q

M = 4


def mv(draw_terms, m=M):
    return Multivector(m, {b: Q(n, d) for b, n, d in draw_terms})


def multivectors(m=M):
    term = st.tuples(st.integers(0, (1 << m) - 1), st.integers(-5, 5), st.integers(1, 4))
    return st.lists(term, max_size=6).map(lambda ts: mv(ts, m))


def vectors(m=M, nonzero=False):
    s = st.lists(st.integers(-4, 4), min_size=m, max_size=m)
    return s.filter(any) if nonzero else s


def to_oracle(a):
    out = {}
    for bits, c in a.terms.items():
        out[tuple(blade_indices(bits))] = oracle.scal(c)
    return out


def test_generator_squares_to_minus_one():
    e1 = Multivector.basis(3, 1)
    assert e1 * e1 == Multivector.scalar(3, -1)


def test_unit_element():
    a = Multivector(3, {0b011: 2, 0b101: Q(1, 3)})
    assert Multivector.scalar(3, 1) * a == a


def test_e12_times_e23_is_minus_e13():
    # e1 e2 e2 e3 = e1 (e2 e2) e3 = -e1 e3
    a = Multivector.blade(3, (1, 2))
    b = Multivector.blade(3, (2, 3))
    assert a * b == Multivector.blade(3, (1, 3), -1)
    assert oracle.blade_mul((1, 2), (2, 3)) == (-1, (1, 3))


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_anticommutation_exhaustive(m):
    e = [Multivector.basis(m, i) for i in range(1, m + 1)]
    for i, j in itertools.product(range(m), repeat=2):
        want = Multivector.scalar(m, -2 if i == j else 0)
        assert e[i] * e[j] + e[j] * e[i] == want


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_blade_products_match_transposition_oracle(m):
    for a, b in itertools.product(range(1 << m), repeat=2):
        got = Multivector._raw(m, {a: 1}) * Multivector._raw(m, {b: 1})
        sign, blade = oracle.blade_mul(tuple(blade_indices(a)), tuple(blade_indices(b)))
        assert got == Multivector.blade(m, blade, sign)


@given(multivectors(), multivectors(), multivectors())
def test_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(multivectors(), multivectors())
def test_product_matches_oracle(a, b):
    assert to_oracle(geometric_product(a, b)) == oracle.mv_mul(to_oracle(a), to_oracle(b))


def test_reversion_examples():
    assert reversion(Multivector.blade(3, (1, 2))) == Multivector.blade(3, (1, 2), -1)
    assert reversion(Multivector.basis(3, 1)) == Multivector.basis(3, 1)


@given(multivectors(), multivectors())
def test_reversion_anti_automorphism(a, b):
    assert reversion(a * b) == reversion(b) * reversion(a)
    assert reversion(reversion(a)) == a


@given(multivectors(), multivectors())
def test_clifford_conjugate_anti_automorphism(a, b):
    assert (a * b).clifford_conjugate() == b.clifford_conjugate() * a.clifford_conjugate()


def test_grade_projection():
    a = Multivector.scalar(3, 3) + Multivector.blade(3, (1, 2))
    assert grade_project(a, 0) == Multivector.scalar(3, 3)
    assert grade_project(Multivector.basis(3, 1), 2).is_zero()


@given(multivectors())
def test_grades_reconstruct(a):
    total = Multivector.scalar(M, 0)
    for r in range(M + 1):
        total = total + grade_project(a, r)
    assert total == a


def test_reflection_examples():
    e1, e2 = Multivector.basis(3, 1), Multivector.basis(3, 2)
    assert reflect_vector(e1, e1) == -e1
    assert reflect_vector(e1, e2) == e2
    img = reflect_vector((3, 4, 0), e1)
    # -x_par + x_perp along a = 3e1 + 4e2
    assert img == Multivector.vector(3, (Q(7, 25), Q(-24, 25), 0))
    assert img.norm_sq() == 1


@given(vectors(nonzero=True), vectors())
def test_reflection_isometry(a, x):
    x = Multivector.vector(M, x)
    y = reflect_vector(a, x)
    assert y.is_vector()
    assert y.norm_sq() == x.norm_sq()
    assert reflect_vector(a, y) == x


def test_reflection_rejects_zero_vector():
    with pytest.raises(ValueError):
        reflect_vector((0, 0, 0), Multivector.basis(3, 1))


def test_spin_action_examples():
    x = Multivector.vector(3, (1, 2, 3))
    assert spin_act(VersorProduct(3, ((1, 0, 0), (1, 0, 0))), x) == x
    s = VersorProduct(3, ((1, 0, 0), (0, 1, 0)))
    assert spin_act(s, Multivector.basis(3, 1)) == -Multivector.basis(3, 1)


@given(vectors(nonzero=True), vectors(nonzero=True), vectors())
def test_spin_action_isometry(y1, y2, x):
    s = VersorProduct(M, (tuple(y1), tuple(y2)))
    x = Multivector.vector(M, x)
    assert spin_act(s, x).norm_sq() == x.norm_sq()
    # matches the sandwich with the assembled multivector
    sv = s.multivector()
    assert spin_act(s, x) == sv * x * reversion(sv) / s.norm_sq()


@given(vectors(nonzero=True), vectors(nonzero=True))
def test_versor_matrix_orthogonal(y1, y2):
    O = VersorProduct(M, (tuple(y1), tuple(y2))).matrix()
    for i in range(M):
        for j in range(M):
            assert sum(O[k][i] * O[k][j] for k in range(M)) == (1 if i == j else 0)


def test_witt_frame_m2():
    f, fd, pairs = witt_frame(2, "split")
    e1, e2 = Multivector.basis(2, 1), Multivector.basis(2, 2)
    assert pairs == [(1, 2)]
    assert f[0] == (e1 - I * e2) * Q(1, 2)
    assert f[0] * primitive_idempotent(2) == Multivector.scalar(2, 0)


@pytest.mark.parametrize("m,pairing", [(2, "split"), (4, "split"), (4, "adjacent"), (6, "split"), (6, "adjacent")])
def test_witt_relations(m, pairing):
    f, fd, _ = witt_frame(m, pairing)
    one = Multivector.scalar(m, 1)
    idem = primitive_idempotent(m, pairing)
    for a, b in zip(f, fd):
        assert (a * a).is_zero() and (b * b).is_zero()
        assert a * b + b * a == one
        assert (a * idem).is_zero()
    assert idem * idem == idem


@pytest.mark.parametrize("m", [2, 4, 6])
def test_spinor_dimension(m):
    _, basis = spinor_space(m)
    assert len(basis) == 2 ** (m // 2)


def test_spinor_space_needs_even_dimension():
    with pytest.raises(ValueError):
        spinor_space(3)


@given(multivectors())
def test_dagger_involutive(a):
    a = a + a * I
    assert hermitian_dagger(hermitian_dagger(a)) == a


def test_json_round_trip():
    a = Multivector(3, {0b011: Q(2, 3), 0b100: -1}) + Multivector.scalar(3, 1) * I
    assert Multivector.from_json(a.to_json()) == a
