from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kptau.algebra import (
    NPoly,
    SurdPoly,
    TPolynomial,
    eval_N,
    interpolate,
    monomial,
    mono_mul,
    monomials_up_to,
    mul_truncated,
    partitions,
    rational_str,
    sub_multisets,
    weight,
)

N = NPoly.N()


def test_weight_examples():
    assert weight(monomial({3: 1})) == 3
    assert weight(monomial({1: 2, 2: 1})) == 4
    assert weight(monomial({})) == 0


def test_mul_truncated_examples():
    a = TPolynomial({(): 1, (1,): 1})
    assert mul_truncated(a, a, 2) == TPolynomial({(): 1, (1,): 2, (1, 1): 1})
    assert mul_truncated(TPolynomial.var(3), TPolynomial.var(1), 3).is_zero()
    p = TPolynomial.var(2, N)
    assert mul_truncated(p, p, 4) == TPolynomial({(2, 2): N * N})


def test_eval_N_examples():
    p = TPolynomial({(3,): NPoly([Fraction(1, 8), 0, Fraction(3, 2)])})
    assert eval_N(p, 0) == TPolynomial({(3,): Fraction(1, 8)})
    q = TPolynomial({(1, 2): 2 * N})
    assert eval_N(q, 1) == TPolynomial({(1, 2): 2})
    assert eval_N(q, 0).is_zero()


def test_npoly_normal_form():
    assert NPoly([1, 0, 0]).c == (Fraction(1),)
    assert NPoly().degree == -1
    assert (N * N - N * N).is_zero()
    assert NPoly([Fraction(2, 4)]).c[0] == Fraction(1, 2)
    assert rational_str(Fraction(-3, 6)) == "-1/2"
    assert NPoly.from_json(NPoly([1, Fraction(-2, 3)]).to_json()) == NPoly([1, Fraction(-2, 3)])


def test_interpolate_recovers_polynomial():
    p = NPoly([3, -1, Fraction(1, 2), 2])
    pts = [(Fraction(x), p(x)) for x in range(4)]
    assert interpolate(pts) == p


def test_surd_arithmetic_cancels_roots():
    r2 = SurdPoly.sqrt(2)
    r6 = SurdPoly.sqrt(6)
    r3 = SurdPoly.sqrt(3)
    assert (r2 * r2).rational() == NPoly.const(2)
    assert (r2 * r3) == r6
    assert (SurdPoly.sqrt(Fraction(3, 2)) * SurdPoly.sqrt(Fraction(2, 3))).rational() == NPoly.const(1)
    with pytest.raises(ValueError):
        r2.rational()


def test_sub_multisets_falling_factorials():
    out = {(d, rest): f for d, rest, f in sub_multisets((1, 1, 1, 2), 2)}
    assert out[((1, 1), (1, 2))] == 6  # d^2/dt1^2 t1^3 = 6 t1
    assert out[((1, 2), (1, 1))] == 3
    assert out[((), (1, 1, 1, 2))] == 1


def test_partitions_counts():
    assert [len(partitions(n)) for n in range(10)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30]
    assert sum(1 for _ in monomials_up_to(4)) == 12


# -- properties

coef = st.fractions(min_value=-3, max_value=3, max_denominator=4)
npoly = st.lists(coef, max_size=3).map(NPoly)
mono = st.lists(st.integers(1, 4), max_size=3).map(lambda xs: tuple(sorted(xs)))
tpoly = st.dictionaries(mono, npoly, max_size=4).map(TPolynomial)


@settings(max_examples=60, deadline=None)
@given(tpoly, tpoly, tpoly)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a
    assert (a - a).is_zero()


@settings(max_examples=60, deadline=None)
@given(mono, mono)
def test_weight_additive(m1, m2):
    assert weight(mono_mul(m1, m2)) == weight(m1) + weight(m2)


@settings(max_examples=60, deadline=None)
@given(tpoly, tpoly, st.integers(0, 12))
def test_mul_truncated_is_product_then_truncate(a, b, W):
    assert mul_truncated(a, b, W) == mul_truncated(a, b, None).truncate(W)


@settings(max_examples=40, deadline=None)
@given(npoly, npoly, coef)
def test_npoly_evaluation_is_a_homomorphism(p, q, x):
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q)(x) == p(x) + q(x)


@settings(max_examples=40, deadline=None)
@given(tpoly)
def test_json_round_trip(p):
    assert TPolynomial.from_json(p.to_json()) == p
