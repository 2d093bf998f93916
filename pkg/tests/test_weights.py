import json
import os

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from cliffspin.conformal import _inv_weight
from cliffspin.weights import (
    chirality_swap,
    half_integer_instance,
    integer_spin_instance,
    intertwiner_from_weights,
    intertwiner_spec,
    lambda_omega,
    soucek_table,
    soucek_table_row,
    table_columns,
)

HALF = mpq(1, 2)
SNAPSHOT = os.path.join(os.path.dirname(__file__), "goldens", "soucek_tables.json")


def oracle_weights(m, B, D, A, C=None):
    """lambda = sum (D_i - 1) w_i + (A - 1) s+ + (C - 1) s-, with w_i the i-th fundamental weight."""
    n = m // 2
    lam = [mpq(0)] * n
    for i, d in enumerate(D, start=1):
        w = [1] * i + [0] * (n - i)
        lam = [l + (d - 1) * c for l, c in zip(lam, w)]
    sp = [HALF] * n
    lam = [l + (A - 1) * c for l, c in zip(lam, sp)]
    if m % 2 == 0:
        sm = [HALF] * (n - 1) + [-HALF]
        lam = [l + (C - 1) * c for l, c in zip(lam, sm)]
        omega = n - (B + sum(D) + mpq(A + C, 2))
    else:
        omega = mpq(2 * n + 1, 2) - (B + sum(D) + mpq(A, 2))
    return tuple(lam), omega


def even_params(m):
    nd = m // 2 - 2
    return st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4), st.lists(st.integers(0, 4), min_size=nd, max_size=nd))


def odd_params(m):
    nd = (m - 1) // 2 - 1
    val = st.integers(0, 8).map(lambda t: mpq(t, 2))
    return st.tuples(val, val, st.lists(val, min_size=nd, max_size=nd)).filter(
        lambda p: any(v.denominator == 2 for v in [p[0], p[1], *p[2]])
    )


# -- lambda and omega ---------------------------------------------------------


@pytest.mark.parametrize("m", [6, 8, 10, 12])
@pytest.mark.parametrize("j", [0, 1, 2, 3])
def test_integer_spin_tuple(m, j):
    n = m // 2
    D = [j + 1] + [1] * (n - 3)
    rec = lambda_omega(m, 0, D, 1, 1)
    assert rec.lam == tuple([j] + [0] * (n - 1))


def test_j_zero_gives_zero_weight():
    assert lambda_omega(8, 0, [1, 1], 1, 1).lam == (0, 0, 0, 0)
    assert lambda_omega(7, 0, [1, 1], 1).lam == (0, 0, 0)


@pytest.mark.parametrize("m", [6, 8, 10])
@pytest.mark.parametrize("j", [1, 2])
def test_half_integer_tuple_computed(m, j):
    # the tuple D_1 = j+1, D_i = 1, A = 1, C = 0 gives (j - 1/2, -1/2, ..., -1/2, 1/2)
    n = m // 2
    rec = lambda_omega(m, 0, [j + 1] + [1] * (n - 3), 1, 0)
    assert rec.lam == tuple([j - HALF] + [-HALF] * (n - 2) + [HALF])


@pytest.mark.xfail(strict=True, reason="the stated half-integer family is not produced by A=1, C=0")
def test_half_integer_tuple_as_stated():
    m, j = 8, 1
    rec = lambda_omega(m, 0, [j + 1, 1], 1, 0)
    assert rec.lam == (j + HALF, HALF, HALF, HALF)


@pytest.mark.parametrize("m", [6, 8])
def test_half_integer_family_from_a_equal_2(m):
    # (j + 1/2, 1/2, ..., +-1/2) needs A = 2, C = 1 (or A = 1, C = 2)
    j, n = 1, m // 2
    plus = lambda_omega(m, 0, [j + 1] + [1] * (n - 3), 2, 1)
    minus = lambda_omega(m, 0, [j + 1] + [1] * (n - 3), 1, 2)
    assert plus.lam == tuple([j + HALF] + [HALF] * (n - 1))
    assert minus.lam == chirality_swap(plus.lam)


@given(st.sampled_from([4, 6, 8, 10]).flatmap(lambda m: st.tuples(st.just(m), even_params(m))))
def test_even_weights_match_oracle(case):
    m, (B, A, C, D) = case
    rec = lambda_omega(m, B, D, A, C)
    assert (rec.lam, rec.omega) == oracle_weights(m, B, D, A, C)


@given(st.sampled_from([5, 7, 9]).flatmap(lambda m: st.tuples(st.just(m), odd_params(m))))
def test_odd_weights_match_oracle(case):
    m, (B, A, D) = case
    rec = lambda_omega(m, B, D, A)
    assert (rec.lam, rec.omega) == oracle_weights(m, B, D, A)


def test_malformed_tuples():
    with pytest.raises(ValueError):
        lambda_omega(6, 0, [1], 1)
    with pytest.raises(ValueError):
        lambda_omega(6, 0, [1, 1], 1, 1)
    with pytest.raises(ValueError):
        lambda_omega(7, 0, [1, 1], 1, 1)
    with pytest.raises(ValueError):
        lambda_omega(3, 0, [], 1)


# -- table rows ---------------------------------------------------------------


@given(st.sampled_from([4, 6, 8, 10]).flatmap(lambda m: st.tuples(st.just(m), even_params(m), st.integers(0, 10))))
def test_even_table_round_trip(case):
    m, (a, b, c, d), col = case
    col %= table_columns(m)
    row = soucek_table_row(m, col, a, b, c, d)
    un, pr = row.unprimed, row.primed
    assert lambda_omega(m, un.B, un.D, un.A, un.C).omega == un.omega
    assert row.order == pr.omega - un.omega
    # the primed tuple exchanges A and C, which flips the last weight entry
    assert pr.lam == chirality_swap(un.lam)
    assert row.lambda_equal == (un.A == un.C)


@given(st.sampled_from([5, 7, 9]).flatmap(lambda m: st.tuples(st.just(m), odd_params(m), st.integers(0, 10))))
def test_odd_table_round_trip(case):
    m, (a, b, d), col = case
    col %= table_columns(m)
    row = soucek_table_row(m, col, a, b, 0, d)
    assert row.lambda_equal
    assert row.order == row.primed.omega - row.unprimed.omega


def test_table_domain_errors():
    with pytest.raises(ValueError):
        soucek_table_row(6, 0, -1, 0, 0, [1])
    with pytest.raises(ValueError):
        soucek_table_row(6, 0, HALF, 0, 0, [1])
    with pytest.raises(ValueError):
        soucek_table_row(7, 0, 1, 1, 0, [1, 1])  # odd table needs a half-integer
    with pytest.raises(ValueError):
        soucek_table_row(6, 5, 1, 1, 1, [1])
    with pytest.raises(ValueError):
        soucek_table_row(6, 0, 1, 1, 1, [1, 1])


def test_odd_table_flags():
    row = soucek_table_row(7, 0, HALF, 1, 2, [1, 1])
    assert "odd table ignores c: e = a + b + d" in row.flags
    assert "odd table first column uses A = a + d_(n-2) as printed" in row.flags


def snapshot_tables():
    cases = [(4, 1, 2, 3, []), (6, 1, 0, 2, [3]), (8, 2, 1, 1, [1, 2]), (10, 0, 1, 3, [2, 0, 1])]
    out = {}
    for m, a, b, c, d in cases:
        out[f"even m={m}"] = [r.to_json() for r in soucek_table(m, a, b, c, d)]
    for m, a, b, d in [(5, HALF, 1, [2]), (7, 1, HALF, [1, mpq(3, 2)]), (9, mpq(3, 2), 0, [HALF, 1, 2])]:
        out[f"odd m={m}"] = [r.to_json() for r in soucek_table(m, a, b, 0, d)]
    return out


def test_table_snapshot():
    with open(SNAPSHOT) as fh:
        frozen = json.load(fh)
    assert json.loads(json.dumps(snapshot_tables())) == frozen


# -- instantiations -----------------------------------------------------------


@pytest.mark.parametrize("m", [4, 6, 8, 10, 12])
@pytest.mark.parametrize("b", range(6))
def test_integer_spin_instance(m, b):
    inst = integer_spin_instance(m, 1, b)
    row, want = inst["row"], inst["expected"]
    assert row.order == want["order"]
    assert row.unprimed.omega == want["omega"]
    assert row.primed.omega == want["omega_prime"]
    assert row.unprimed.lam == want["lambda"]
    assert row.lambda_equal


@pytest.mark.parametrize("m", [4, 6, 8, 10, 12])
@pytest.mark.parametrize("b", range(6))
def test_half_integer_instance_formulas(m, b):
    inst = half_integer_instance(m, 1, b)
    row, want = inst["row"], inst["expected"]
    assert row.order == want["order"]
    assert row.unprimed.omega == want["omega"]
    assert row.primed.omega == want["omega_prime"]
    # lambda and lambda' differ by the sigma+/sigma- exchange
    assert row.primed.lam == chirality_swap(row.unprimed.lam)
    assert not row.lambda_equal


def test_half_integer_instance_m4_lambda():
    # (a, c) = (j+1, j) reproduces the weight formulas; lambda comes out as (j - 1/2, 1/2)
    inst = half_integer_instance(4, 1, 0)
    assert inst["row"].unprimed.lam == (HALF, HALF)
    assert inst["expected"]["lambda"] == (mpq(3, 2), HALF)


# -- intertwiners -------------------------------------------------------------


@pytest.mark.parametrize("m", [3, 4, 7, 10])
def test_intertwiner_examples(m):
    J2 = intertwiner_spec(2)
    assert not J2.vector_factor and J2.exponents(m) == (2 - m, -m - 2)
    J1 = intertwiner_spec(1)
    assert J1.vector_factor and J1.exponents(m) == (-m, -m - 2)
    J5 = intertwiner_spec(5)
    assert J5.exponents(m) == (4 - m, -m - 6)


@pytest.mark.parametrize("k", range(1, 9))
def test_intertwiner_matches_inversion_weight(k):
    # c = 1, d = 0 turns J_k into |x|^e (x if odd), the inversion weight
    for m in range(3, 9):
        w, vec = _inv_weight(m, k)
        spec = intertwiner_spec(k)
        assert (spec.exponents(m)[0], spec.vector_factor) == (w, vec)
        # the two weights differ by the order shift 2k
        ein, eout = spec.exponents(m)
        assert ein - eout == 2 * k


@pytest.mark.parametrize("m", [4, 6, 8, 10, 12])
def test_intertwiner_from_instance_weights(m):
    for b in range(6):
        inst = integer_spin_instance(m, 1, b)
        row = inst["row"]
        k = int(row.order)
        got = intertwiner_from_weights(m, row.unprimed.omega, row.primed.omega, False)
        assert got == intertwiner_spec(k).exponents(m)
        hrow = half_integer_instance(m, 1, b)["row"]
        k = int(hrow.order)
        got = intertwiner_from_weights(m, hrow.unprimed.omega, hrow.primed.omega, True)
        assert got == intertwiner_spec(k).exponents(m)


def test_intertwiner_rejects_bad_order():
    with pytest.raises(ValueError):
        intertwiner_spec(0)
