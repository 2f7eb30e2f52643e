from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kptau.correlators import (
    CorrelatorKey,
    correlator,
    correlator_table,
    exp_series,
    genus_of,
    key_of,
    table_json,
    table_text,
    time_factor,
)

F = Fraction


@pytest.mark.parametrize("alphas,betas,h,b,value", [
    ((0, 0, 0), (), 0, 0, F(1)),
    ((1,), (), 1, 0, F(1, 24)),
    ((4,), (), 2, 0, F(1, 1152)),
    ((7,), (), 3, 0, F(1, 82944)),
    ((1, 1, 1), (), 1, 0, F(1, 12)),
    ((0, 0, 0, 1), (), 0, 0, F(1)),
    ((0, 0, 0, 0, 2), (), 0, 0, F(1)),
    ((0, 0, 0, 1, 1), (), 0, 0, F(2)),
    ((0,), (0,), 0, 1, F(1)),
    ((), (0, 0, 0), 0, 1, F(1)),
])
def test_known_values(F6, alphas, betas, h, b, value):
    assert correlator(F6, CorrelatorKey(alphas, betas, h, b)).value == value


def test_closed_one_point_formula(F6):
    # <tau_{3g-2}>_g = 1 / (24^g g!)
    for g in range(1, 3):
        assert correlator(F6, CorrelatorKey((3 * g - 2,), (), g, 0)).value == F(1, 24 ** g * factorial(g))


def test_selection_rules_flag_zero(F6):
    v = correlator(F6, CorrelatorKey((1,), (), 0, 0))
    assert v.value == 0 and v.flag == "dimension"
    v = correlator(F6, CorrelatorKey((), (0,), 0, 0))
    assert v.value == 0 and v.flag == "parity"


def test_table_rows_obey_dimension_constraint(F6):
    rows = correlator_table(F6)
    assert rows and all(r.key.dimension_ok() and r.flag is None for r in rows)
    assert len({r.key for r in rows}) == len(rows)
    text = table_text(rows)
    assert text.splitlines()[0].split() == ["alphas", "betas", "h", "b", "value"]
    assert table_json(rows)[0].keys() == {"alphas", "betas", "h", "b", "value"}


def test_log_exp_round_trip(tau6, F6):
    assert exp_series(F6) == tau6


def test_time_factors():
    assert [time_factor(k) for k in (1, 2, 3, 4)] == [1, F(1, 2), F(1, 3), F(1, 8)]
    with pytest.raises(ValueError):
        time_factor(0)


def test_genus_errors():
    with pytest.raises(ArithmeticError):
        genus_of((1,), 0)
    with pytest.raises(ArithmeticError):
        genus_of((1, 2), 0)


@given(st.lists(st.integers(0, 4), max_size=4), st.lists(st.integers(0, 4), max_size=4),
       st.integers(0, 3), st.integers(0, 3))
def test_key_round_trip(alphas, betas, h, b):
    key = CorrelatorKey(tuple(alphas), tuple(betas), h, b)
    m = key.monomial()
    if key.dimension_ok() and m:
        assert key_of(m, b) == key
