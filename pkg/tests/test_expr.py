import pytest
from hypothesis import given
from hypothesis import strategies as st

from cliffspin.clifford import Multivector
from cliffspin.expr import ExpressionError, parse_field
from cliffspin.fields import RadialField
from cliffspin.scalars import I, Q


def test_monomial():
    m = 3
    assert parse_field("x1^2*u1", m) == RadialField.x(m, 1, 2) * RadialField.u(m, 1)
    assert parse_field("x_1**2 * u_1", m) == parse_field("x1^2*u1", m)


def test_blades_and_constants():
    m = 4
    f = parse_field("3/2*e13*u4 + i*v2 - 7", m)
    want = RadialField.u(m, 4).right(Multivector.blade(m, (1, 3), Q(3, 2))) + RadialField.v(m, 2) * I - 7
    assert f == want


def test_radial_powers():
    m = 3
    assert parse_field("r^-2*x1", m) == RadialField.x(m, 1) * RadialField.radial(m, -2)
    assert parse_field("r^2", m) == RadialField.normsq(m)
    assert parse_field("r", m) == RadialField.radial(m, 1)


def test_parentheses_and_unary():
    m = 3
    assert parse_field("-(x1 + x2)^2", m) == -(RadialField.x(m, 1) + RadialField.x(m, 2)) ** 2
    assert parse_field("+u1", m) == RadialField.u(m, 1)


def test_multi_digit_blade_reads_digits_as_indices():
    m = 12
    assert parse_field("e12", m) == RadialField.const(m, Multivector.blade(m, (1, 2)))


@pytest.mark.parametrize(
    "text",
    ["", "  ", "x4", "y1", "e11", "e15", "x1/x2", "x1^y", "x1^-1", "1/0", "2.5*x1", "x1 +", "f(x1)", "x1 < 2"],
)
def test_rejects(text):
    with pytest.raises(ExpressionError):
        parse_field(text, 3)


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(1, 3), st.integers(0, 3)), min_size=1, max_size=4))
def test_polynomials_round_trip(terms):
    m = 3
    text = " + ".join(f"({c})*x{i}^{p}*u{i}" for c, i, p in terms)
    want = RadialField.zero(m)
    for c, i, p in terms:
        want = want + RadialField.x(m, i, p) * RadialField.u(m, i) * c
    assert parse_field(text, m) == want
