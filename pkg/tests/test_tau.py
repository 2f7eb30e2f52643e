from fractions import Fraction

import pytest

from kptau.algebra import NPoly, TPolynomial
from kptau.checks import check_shift
from kptau.correlators import kw_specialize
from kptau.operators import OperatorName
from kptau.tau import (
    TauSeries,
    compute_tau_cutjoin,
    compute_tau_linear,
    degree_check,
    odd_only,
    perturbed,
    residual,
    verify_annihilation,
)

N = NPoly.N()
F = Fraction


def test_layer_zero_and_one():
    tau = compute_tau_cutjoin(1)
    assert tau.layer(0) == TPolynomial.one()
    assert tau.layer(1) == TPolynomial({(3,): F(1, 8) + F(3, 2) * N * N, (1, 2): 2 * N, (1, 1, 1): F(1, 6)})


def test_series_validation():
    with pytest.raises(ValueError):
        TauSeries({0: TPolynomial({(1,): 1})})
    t = TauSeries({0: TPolynomial.one()})
    with pytest.raises(ValueError):
        t.set_layer(1, TPolynomial({(1,): 1}))
    with pytest.raises(ValueError):
        compute_tau_linear(-1)


def test_cutjoin_equals_linear(tau6, linear6):
    assert tau6 == linear6.tau


def test_every_layer_uniquely_determined(linear6):
    for man in linear6.manifest:
        assert man.rank == man.unknowns
        assert man.equations >= man.unknowns
    assert linear6.manifest[0].ranges == {"Lsf": (-1, 0), "Msf": (-2, -2)}


def test_resume_matches_fresh_run(tau6):
    assert compute_tau_cutjoin(6, start=compute_tau_cutjoin(3)) == tau6
    assert compute_tau_linear(4, start=tau6.truncated(2)).tau == tau6.truncated(4)


def test_annihilation(tau8):
    rep = verify_annihilation(tau8, range(-1, 4), range(-2, 3), 9)
    assert rep.passed, rep.first_failure()


def test_lsf_minus_two_is_not_a_constraint(tau8):
    assert residual(OperatorName("Lsf", -2), tau8, 6)


def test_perturbed_tau_fails(tau8):
    bad = perturbed(tau8, 2, (2, 4))
    rep = verify_annihilation(bad, range(-1, 3), range(-2, 1), 9)
    assert not rep.passed
    assert "Lsf" in rep.first_failure() or "Msf" in rep.first_failure()


def test_insufficient_layers_are_reported(tau6):
    rep = verify_annihilation(tau6.truncated(1), [4], [], 12)
    assert not rep.passed and rep.checks[0].note


def test_degree(tau6):
    assert degree_check(tau6).passed


def test_kw_specialisation(tau6):
    kw = kw_specialize(tau6)
    assert all(odd_only(p) for p in kw.layers.values())
    # the N = 0 tau-function satisfies the closed Virasoro constraints
    rep = verify_annihilation(kw, range(-1, 3), [], 9, families=("KW_CalL", "KW_CalL"))
    assert rep.passed, rep.first_failure()


@pytest.mark.parametrize("name,shift", [("W1", 3), ("W2", 6)])
def test_layers_closed_under_cut_join(tau6, name, shift):
    assert check_shift(OperatorName(name), shift, 12).passed


def test_eval_n(tau6):
    t2 = tau6.eval_N(2)
    assert t2.layer(1).coefficient((3,)) == NPoly.const(F(1, 8) + 6)
    assert t2.layer(1).coefficient((1, 2)) == NPoly.const(4)
