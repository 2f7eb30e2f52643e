from fractions import Fraction

import pytest

from kptau.algebra import NPoly, SurdPoly, TPolynomial, monomials_up_to
from kptau.checks import (
    check_constraint_algebra,
    check_kw_reduction,
    check_shift,
    check_w3,
    check_winf,
    proportionality,
    w3_normalization,
)
from kptau.miura import dot, weight_vectors
from kptau.modes import J_E, J_O, NABLA_E, FieldExpr, OperatorExpr
from kptau.operators import (
    OperatorName,
    apply,
    build,
    check_miura_match,
    commutator_on_basis,
    degree_field,
)

N = NPoly.N()
F = Fraction


def op(text, W=9):
    return build(OperatorName.parse(text), W)


def P(d):
    return TPolynomial(d)


def same_on_basis(a, b, W):
    return all(apply(a, P({m: 1})) == apply(b, P({m: 1})) for m in monomials_up_to(W))


def test_names():
    assert str(OperatorName.parse("Lsf[-1]")) == "Lsf[-1]"
    assert OperatorName.parse("W1") == OperatorName("W1")
    with pytest.raises(ValueError):
        OperatorName("Lsf")
    with pytest.raises(ValueError):
        OperatorName("D", 2)
    with pytest.raises(ValueError):
        OperatorName("Nope", 1)
    with pytest.raises(ValueError):
        op("Mstar[-3]")


def test_small_actions():
    assert apply(op("Lsf[-1]"), P({(): 1})) == P({(1, 1): F(1, 2), (2,): 2 * N})
    assert apply(op("Lsf[0]"), P({(): 1})) == P({(): F(1, 16) + F(3, 4) * N * N}) * 2
    assert apply(op("D"), P({(1, 2): 1})) == P({(1, 2): 1})
    # the degree operator counts weight / 3
    assert apply(op("D"), P({(3, 3): 1})) == P({(3, 3): 2})


def test_truncated_operator_refuses_heavy_input():
    with pytest.raises(ValueError):
        apply(op("Lsf[1]", 4), P({(5,): 1}))


def test_boundary_convention_dt0_is_zero():
    # Lsf[0] would pick up 3N * N (from dt_0 -> N) under the other convention;
    # the built operator has exactly the regularisation constant.
    c = op("Lsf[0]").rational().terms[((), ())]
    assert c == F(1, 8) + F(3, 2) * N * N
    assert all(0 not in de and 0 not in mu for mu, de in op("Msf[0]").terms)


def test_commutator_on_basis_heisenberg():
    out = commutator_on_basis(OperatorName("J_KP", 2), OperatorName("J_KP", -2), 6)
    assert all(v == P({m: 2}) for m, v in out.items())


def test_miura_weights():
    hs = weight_vectors()
    for i, a in enumerate(hs):
        for j, b in enumerate(hs):
            assert dot(a, b) == SurdPoly.of(F(int(i == j)) - F(1, 3))
    assert sum((h[0] for h in hs), SurdPoly()) == SurdPoly()
    assert sum((h[1] for h in hs), SurdPoly()) == SurdPoly()


def test_miura_match():
    rep = check_miura_match(7, range(-2, 3))
    assert rep.passed, rep.mismatches


def test_proportionality_constants():
    rl = proportionality("CalL_N", "Lsf", range(-1, 4), 8)
    assert rl.constant == NPoly.const(F(1, 2)) and not rl.disagree
    rm = proportionality("CalM_N", "Mstar", range(-2, 3), 8)
    assert rm.constant == NPoly.const(F(1, 4)) and not rm.disagree


def test_generating_function_form_of_lsf():
    Jo, Je, Ne = FieldExpr.current(J_O), FieldExpr.current(J_E), FieldExpr.current(NABLA_E)
    f = (Jo * Jo + Je * Je + Ne * Ne * 2 + FieldExpr.power(-2, F(1, 4))) * F(1, 2)
    for k in range(-1, 3):
        assert same_on_basis(f.mode(-2 * k - 2, 8).rational(), op(f"Lsf[{k}]", 8), 8)


def test_generating_function_form_of_mprime():
    Jo, Je, Ne = FieldExpr.current(J_O), FieldExpr.current(J_E), FieldExpr.current(NABLA_E)
    f = (Jo * Jo * Je * 3 + Je * Je * Je - Ne * Ne * Ne * 4 + Je * FieldExpr.power(-2, F(3, 4))) * F(1, 3)
    for k in range(-2, 3):
        assert same_on_basis(f.mode(-2 * k - 3, 8).rational(), op(f"Mprime[{k}]", 8), 8)


def test_kw_reduction():
    assert all(r.passed for r in check_kw_reduction(range(-1, 3), 8))


@pytest.mark.parametrize("name,shift", [("W1", 3), ("W2", 6), ("D", 0)])
def test_cut_join_grading(name, shift):
    assert check_shift(OperatorName(name), shift, 9).passed


def test_degree_free_field_form():
    assert same_on_basis(degree_field().mode(-1, 8).rational(), op("D", 8), 8)


def test_constraint_algebra():
    pairs = [(k, l) for k in range(-1, 2) for l in range(-2, 2)]
    bad = [r.describe() for r in check_constraint_algebra(pairs, 7) if not r.passed]
    assert not bad


def test_winf_subset():
    bad = [r.describe() for r in check_winf([-2, 0, 1, 2], 6) if not r.passed]
    assert not bad


def test_virasoro_and_lm_lines():
    pairs = [(1, -1), (2, -2), (-1, 2), (0, 1)]
    assert all(r.passed for r in check_w3(pairs, 7, which=("LL", "LM")))


def test_mm_line_needs_normalisation():
    # as built, the M-modes satisfy the [M, M] line only after rescaling by sqrt(3/2)
    assert w3_normalization() == F(3, 2)
    pairs = [(1, -1), (2, -2), (3, -2)]
    assert not any(r.passed for r in check_w3(pairs, 6, which=("MM",)))
    assert all(r.passed for r in check_w3(pairs, 6, which=("MM",), m_norm=F(3, 2)))


def test_spec_examples():
    assert op("J_KP[5]").terms == {((), (5,)): NPoly.const(1)}
    assert apply(op("CalL_N[0]"), P({(): 1})) == P({(): F(1, 16) + F(3, 4) * N * N})
    assert apply(OperatorExpr.d(3), P({(3, 3): 1})) == P({(3,): 2})
