from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from kptau.algebra import NPoly
from kptau.linsolve import Inconsistent, SparseSystem, Underdetermined, solve

N = NPoly.N()
C = NPoly.const


def test_exact_solve():
    sol = solve(["x", "y"], [("a", {"x": C(1), "y": C(1)}, C(3)), ("b", {"x": C(1), "y": C(-1)}, C(1)),
                             ("c", {"x": C(2)}, C(4))])
    assert sol == {"x": C(2), "y": C(1)}


def test_n_dependent_pivot_falls_back_to_sampling():
    system = SparseSystem(["x"])
    system.add({"x": N + C(1)}, N * N + N)
    sol, method = system.solve()
    assert method == "sampled" and sol["x"] == N


def test_inconsistent_row_is_named():
    with pytest.raises(Inconsistent) as err:
        solve(["x"], [("a", {"x": C(1)}, C(1)), ("b", {"x": C(2)}, C(3))])
    assert err.value.tag == "b"


def test_underdetermined_reports_free_columns():
    with pytest.raises(Underdetermined) as err:
        solve(["x", "y"], [("a", {"x": C(1), "y": C(1)}, C(0))])
    assert err.value.free == ["y"]


def test_unknown_column_rejected():
    with pytest.raises(ValueError):
        SparseSystem(["x"]).add({"z": C(1)})


def test_rank_reports_new_information():
    s = SparseSystem(["x", "y"])
    assert s.add({"x": C(1)}, C(1))
    assert not s.add({"x": C(2)}, C(2))
    assert s.rank == 1 and not s.is_full_rank()


npolys = st.lists(st.integers(-3, 3), min_size=1, max_size=3).map(lambda cs: NPoly(tuple(Fraction(c) for c in cs)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.lists(st.lists(npolys, min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(npolys, min_size=n, max_size=n))))
def test_random_systems_recover_solution(data):
    A, x = data
    n = len(x)
    cols = list(range(n))
    rows = []
    for i, r in enumerate(A):
        b = NPoly.const(0)
        for a, xv in zip(r, x):
            b = b + a * xv
        rows.append((i, {j: a for j, a in enumerate(r) if a}, b))
    try:
        sol = solve(cols, rows)
    except Underdetermined:
        assume(False)
    assert [sol[j] for j in cols] == list(x)
