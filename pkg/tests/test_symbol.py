import json
import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cliffspin.clifford import Multivector, VersorProduct
from cliffspin.conformal import build_operator
from cliffspin.fields import builtin
from cliffspin.linalg import det
from cliffspin.scalars import Q, parse_rational
from cliffspin.symbol import (
    bosonic_det_closed_form,
    bosonic_det_factor,
    default_xi,
    ellipticity_report,
    operator_symbol_matrix,
    paper_P_evaluate,
    paper_P_sum_form,
    principal_symbol,
)

with open(os.path.join(os.path.dirname(__file__), "goldens", "symbol_goldens.json")) as fh:
    GOLDENS = json.load(fh)


def xi_of(rec):
    return tuple(parse_rational(c) for c in rec["xi"])


def matmul(A, B):
    return [[sum(A[i][t] * B[t][j] for t in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


nonzero_xi = st.lists(st.integers(-3, 3), min_size=4, max_size=4).filter(any)


# -- bosonic ------------------------------------------------------------------


@pytest.mark.parametrize("rec", GOLDENS["bosonic_det"][::7], ids=lambda r: f"m{r['m']}n{r['n']}")
def test_bosonic_det_matches_golden(rec):
    S = principal_symbol(rec["m"], 2 * rec["n"], xi_of(rec))
    assert S.det == parse_rational(rec["det"])


def test_goldens_follow_closed_form():
    for rec in GOLDENS["bosonic_det"]:
        assert parse_rational(rec["det"]) == bosonic_det_closed_form(rec["m"], rec["n"], xi_of(rec))


@pytest.mark.parametrize("m,n", [(3, 1), (4, 2), (5, 1), (6, 2)])
def test_symbol_at_em_is_diagonal(m, n):
    xi = (0,) * (m - 1) + (1,)
    S = principal_symbol(m, 2 * n, xi)
    want = [[0] * m for _ in range(m)]
    for i in range(m - 1):
        want[i][i] = 1
    want[m - 1][m - 1] = bosonic_det_factor(m, n)
    assert S.entries == want


@pytest.mark.parametrize("m,n", [(3, 1), (4, 1), (5, 2), (6, 2)])
def test_routes_agree(m, n):
    for k in (2 * n, 2 * n - 1):
        for xi in default_xi(m, 4):
            a = principal_symbol(m, k, xi, route="plane_wave")
            b = principal_symbol(m, k, xi, route="formula")
            assert a.entries == b.entries


def test_bosonic_factor_examples():
    assert bosonic_det_factor(3, 1) == Q(-1, 3)
    assert principal_symbol(3, 2, (1, 2, 2)).det != 0
    S = principal_symbol(4, 2, (0, 0, 0, 1))
    assert S.det == 0 and S.rank == 3


@pytest.mark.parametrize("m,n", [(4, 1), (6, 2), (8, 3)])
def test_bosonic_degeneracy_at_m_2n_plus_2(m, n):
    for xi in default_xi(m, 3):
        S = principal_symbol(m, 2 * n, xi)
        assert S.det == 0
        assert S.rank == m - 1


@given(nonzero_xi, nonzero_xi)
def test_symbol_multiplicative(xi, zeta):
    # sigma(A B) = sigma(A) sigma(B) for the constant coefficient operators Lap and D_(1,2)
    m = 4
    A = builtin("laplace_x", m)
    B = build_operator(m, 2).op
    left = operator_symbol_matrix(A @ B, 4, xi)
    right = matmul(operator_symbol_matrix(A, 2, xi), operator_symbol_matrix(B, 2, xi))
    assert left == right


@given(nonzero_xi)
def test_rotation_covariance(xi):
    m = 4
    O = VersorProduct(m, ((1, 2, 2, 0), (0, 1, 0, 3))).matrix()
    Oxi = [sum(O[i][j] * xi[j] for j in range(m)) for i in range(m)]
    S = principal_symbol(m, 2, xi).entries
    T = principal_symbol(m, 2, Oxi).entries
    Ot = [list(r) for r in zip(*O)]
    assert matmul(matmul(Ot, T), O) == S


@given(nonzero_xi, st.integers(1, 5))
def test_symbol_homogeneity(xi, t):
    m, n = 4, 2
    S = principal_symbol(m, 2 * n, xi, with_det=False).entries
    T = principal_symbol(m, 2 * n, [t * c for c in xi], with_det=False).entries
    assert T == [[c * t ** (2 * n) for c in row] for row in S]


# -- fermionic ----------------------------------------------------------------


@pytest.mark.parametrize("rec", GOLDENS["fermionic_rank"][::2], ids=lambda r: f"m{r['m']}n{r['n']}")
def test_fermionic_rank_matches_golden(rec):
    S = principal_symbol(rec["m"], 2 * rec["n"] - 1, xi_of(rec))
    assert (S.rank, S.dim) == (rec["rank"], rec["dim"])


def test_fermionic_full_rank_example():
    assert principal_symbol(4, 1, (3, 4, 0, 0)).full_rank


@pytest.mark.parametrize("m,n", [(4, 2), (6, 3)])
def test_fermionic_singular_at_m_equal_2n(m, n):
    S = principal_symbol(m, 2 * n - 1, (0,) * (m - 1) + (1,))
    assert not S.full_rank
    assert S.rank < S.dim
    # the closed form of P stays nonzero there
    assert not paper_P_evaluate(m, n, (0,) * (m - 1) + (1,)).is_zero()


@pytest.mark.parametrize("m,n", [(3, 1), (3, 2), (5, 2), (5, 3), (6, 2)])
def test_fermionic_regular_off_m_equal_2n(m, n):
    for xi in default_xi(m, 2):
        assert principal_symbol(m, 2 * n - 1, xi).full_rank


# -- the polynomial P ----------------------------------------------------------


@pytest.mark.parametrize("m,n", [(3, 1), (4, 1), (4, 2), (6, 3)])
def test_P_at_em(m, n):
    em = (0,) * (m - 1) + (1,)
    c = Q(4 * n - 2, m + 2 * n - 2)
    assert paper_P_evaluate(m, n, em) == Multivector.scalar(m, 1 + 2 * c)


def test_P_at_e1():
    m, n = 4, 1
    c = Q(4 * n - 2, m + 2 * n - 2)
    # -e1 e4 - c e1 e4
    assert paper_P_evaluate(m, n, (1, 0, 0, 0)) == Multivector.blade(m, (1, 4), -(1 + c))


@given(nonzero_xi, st.integers(-3, 3).filter(bool))
def test_P_cubic(x, t):
    m, n = 4, 2
    assert paper_P_evaluate(m, n, [t * c for c in x]) == paper_P_evaluate(m, n, x) * t**3


def test_P_sum_form_differs_from_closed_form():
    m, n = 4, 1
    x = (1, 2, 0, 1)
    assert paper_P_sum_form(m, n, x) != paper_P_evaluate(m, n, x)
    # at e_m: 1 + (m-1) c1 from the sum, 1 + 2(c1 + c2) from the closed form
    em = (0, 0, 0, 1)
    assert paper_P_sum_form(m, n, em) == Multivector.scalar(m, Q(5, 2))
    assert paper_P_evaluate(m, n, em) == Multivector.scalar(m, 2)


def test_ellipticity_report_records():
    recs = ellipticity_report([4], [1], "even", xi_samples=[(1, 0, 0, 0)])
    assert recs[0]["det"] == "0" and recs[0]["det_matches"] and "degenerate" in recs[0]
    recs = ellipticity_report([4], [2], "odd", xi_samples=[(0, 0, 0, 1)])
    assert recs[0]["P_nonzero"] and not recs[0]["full_rank"] and not recs[0]["agrees"]


def test_bad_frequency():
    with pytest.raises(ValueError):
        principal_symbol(3, 2, (0, 0, 0))
    with pytest.raises(ValueError):
        principal_symbol(3, 2, (1, 0))
    with pytest.raises(ValueError):
        principal_symbol(3, 2, (1, 0, 0), route="other")


def test_det_helper_on_known_matrix():
    assert det([[2, 1], [1, 1]]) == 1
