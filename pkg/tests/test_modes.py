from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kptau.algebra import NPoly, SurdPoly, TPolynomial, monomials_up_to
from kptau.modes import (
    CALJ_E,
    CALJ_O,
    CALJ_O_NOSHIFT,
    J_E,
    J_KP,
    J_MKP,
    J_O,
    ElementaryOp,
    FieldExpr,
    OperatorExpr,
    current_mode,
    laurent_negative_part,
    normal_ordered_product,
)
from kptau.operators import apply

N = NPoly.N()


def test_zero_modes():
    (op,) = current_mode(J_MKP, 0)
    assert op.kind == "scalar" and op.scale == SurdPoly.of(N)
    assert current_mode(J_KP, 0) == ()
    (op,) = current_mode(CALJ_E, 0)
    assert op.kind == "scalar" and op.scale == SurdPoly.sqrt(Fraction(3, 2), N)


def test_parity_mismatch_raises():
    with pytest.raises(ValueError):
        current_mode(CALJ_O, 2)
    with pytest.raises(ValueError):
        current_mode(CALJ_E, 1)
    with pytest.raises(ValueError):
        current_mode(J_KP, 3)  # z-currents have integer modes


def test_dilaton_scalar_sits_on_t3_mode():
    ops = current_mode(CALJ_O, -3)
    assert [o.kind for o in ops] == ["mul", "scalar"]
    assert ops[1].hbar == 1 and ops[1].scale == -SurdPoly.sqrt(Fraction(1, 2))
    assert [o.kind for o in current_mode(CALJ_O_NOSHIFT, -3)] == ["mul"]
    assert [o.kind for o in current_mode(J_O, -6)] == ["mul", "scalar"]


def test_elementary_op_invariants():
    with pytest.raises(ValueError):
        ElementaryOp("scalar", SurdPoly.of(1), 2)
    with pytest.raises(ValueError):
        ElementaryOp("mul", SurdPoly(), 1)


def test_virasoro_quadratic_part():
    op = normal_ordered_product([J_KP, J_KP], -4, 10) * Fraction(1, 2)
    assert op.rational().terms[((1, 1), ())] == NPoly.const(Fraction(1, 2))


def test_single_current_positive_mode_is_derivative():
    for k in (1, 2, 5):
        op = normal_ordered_product([J_KP], 2 * k, 10).rational()
        assert op.terms == {((), (k,)): NPoly.const(1)}


def test_odd_square_carries_dilaton_cross_term():
    # modes of :CalJ_o^2: at total index 0: the (-3, +3) pair gives -(1/2) d/dt_3 from the shift
    op = normal_ordered_product([CALJ_O, CALJ_O], 0, 6).rational()
    assert op.terms[((), (3,))] == NPoly.const(-1)  # two orderings of the pair, each -1/2


def test_arity_and_grading_errors():
    with pytest.raises(ValueError):
        normal_ordered_product([J_KP] * 5, 0, 3)
    with pytest.raises(ValueError):
        normal_ordered_product([J_KP, CALJ_E], 0, 3)


def test_laurent_negative_part():
    fam = {-2: "a", -1: "b", 0: "c"}
    assert laurent_negative_part(fam, 2) == {-1: "b", 0: "c"}
    assert laurent_negative_part({}, 2) == {}
    assert sorted(laurent_negative_part({k: k for k in range(-4, 2)}, 3)) == [-2, -1, 0, 1]


# single modes of the rescaled currents carry surds; a fixed rescaling makes them rational
_RESCALE = {"o": (SurdPoly.sqrt(2), 2), "e": (SurdPoly.sqrt(6), 6), "z": (SurdPoly.of(1), 1)}


def _kind(current):
    return "z" if current is J_KP else ("o" if current in (CALJ_O, CALJ_O_NOSHIFT) else "e")


def _mode(c, d, W):
    s, _ = _RESCALE[_kind(c)]
    return (normal_ordered_product([c], d, W) * s).rational()


def _commutator_on(a, b, m):
    p = TPolynomial({m: 1})
    return apply(a, apply(b, p)) - apply(b, apply(a, p))


@pytest.mark.parametrize("current,step", [(CALJ_O_NOSHIFT, 2), (CALJ_E, 2), (J_KP, 2)])
def test_canonical_commutation(current, step):
    W = 8
    start = 1 if current is CALJ_O_NOSHIFT else 2
    for d in range(start, 7, step):
        a, b = _mode(current, d, W), _mode(current, -d, W)
        for m in monomials_up_to(W - d):
            scale = _RESCALE[_kind(current)][1]
            assert _commutator_on(a, b, m) == TPolynomial({m: Fraction(d, 2) * scale})


def test_odd_and_even_modes_commute():
    W = 7
    for d_o in (-3, -1, 1, 3):
        for d_e in (-4, -2, 2, 4):
            a, b = _mode(CALJ_O, d_o, W), _mode(CALJ_E, d_e, W)
            for m in monomials_up_to(3):
                assert _commutator_on(a, b, m).is_zero()


@settings(max_examples=25, deadline=None)
@given(st.integers(-6, 6), st.integers(2, 3))
def test_products_are_homogeneous_and_normal_ordered(total, arity):
    cs = [CALJ_E] * arity
    op = normal_ordered_product(cs, 2 * total, 8)
    assert op.is_normal_ordered()
    for (mu, de) in op.terms:
        assert list(mu) == sorted(mu) and list(de) == sorted(de)
        assert sum(mu) - sum(de) == op.weight_shift == -2 * total


def test_hbar_gap_is_enforced():
    with pytest.raises(ValueError):
        OperatorExpr({((1,), ()): NPoly.const(1)}, 0)
    op = OperatorExpr({((), (3,)): NPoly.const(1)}, 0)
    assert op.hbar_order(((), (3,))) == 1


def test_field_mode_reads_off_regularisation_constant():
    f = FieldExpr.power(-2, Fraction(1, 16))
    assert f.mode(-2, 5).terms == {((), ()): SurdPoly.of(Fraction(1, 16))}
    assert not f.mode(-3, 5).terms
