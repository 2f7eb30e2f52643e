"""Exact sparse linear systems whose entries and right-hand sides lie in Q[N].

Elimination pivots only on constant (N-free) entries, so every division is by
a rational number and the reduced rows stay polynomial in N.  If some column
can only be eliminated through an N-dependent pivot, the whole system is
solved instead at enough rational sample points of N, the unknowns are
interpolated, and the interpolant is substituted back and checked exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Generic, Hashable, List, Optional, Sequence, Tuple, TypeVar

from .algebra import NPOLY_ZERO, NPoly, interpolate

Col = TypeVar("Col", bound=Hashable)
Row = Dict[Col, NPoly]


class LinearSystemError(Exception):
    pass


class Inconsistent(LinearSystemError):
    """A row reduced to ``0 = nonzero``."""

    def __init__(self, tag, rhs: NPoly):
        super().__init__(f"inconsistent equation {tag!r}: 0 = {rhs}")
        self.tag = tag
        self.rhs = rhs


class Underdetermined(LinearSystemError):
    def __init__(self, free: Sequence):
        super().__init__(f"{len(free)} unknown(s) left free, e.g. {list(free)[:5]}")
        self.free = list(free)


def _axpy(row: Row, f: NPoly, pivot_row: Row) -> None:
    """In place: row -= f * pivot_row."""
    for c, v in pivot_row.items():
        w = row[c] - f * v if c in row else -(f * v)
        if w:
            row[c] = w
        else:
            row.pop(c, None)


class SparseSystem(Generic[Col]):
    """Incremental reduced row echelon form over Q[N] with rational pivots.

    Rows are added one at a time with :meth:`add`; the return value says
    whether the row raised the rank.  The columns are fixed up front.
    """

    def __init__(self, columns: Sequence[Col]):
        self.columns = list(columns)
        self._colset = set(self.columns)
        self._order = {c: i for i, c in enumerate(self.columns)}
        self.pivots: Dict[Col, Tuple[Row, NPoly]] = {}
        self.deferred: List[Tuple[object, Row, NPoly]] = []
        self.rows: List[Tuple[object, Row, NPoly]] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def is_full_rank(self) -> bool:
        return len(self.pivots) == len(self.columns)

    def _reduce(self, row: Row, rhs: NPoly) -> Tuple[Row, NPoly]:
        row = dict(row)
        for c in [c for c in row if c in self.pivots]:
            f = row.get(c)
            if not f:
                continue
            prow, prhs = self.pivots[c]
            _axpy(row, f, prow)
            rhs = rhs - f * prhs
        return row, rhs

    def add(self, row: Row, rhs: NPoly = NPOLY_ZERO, tag=None) -> bool:
        unknown = set(row) - self._colset
        if unknown:
            raise ValueError(f"row {tag!r} touches unknown columns {sorted(unknown, key=str)[:3]}")
        row = {c: v for c, v in row.items() if v}
        self.rows.append((tag, row, rhs))
        return self._insert(tag, row, rhs)

    def _insert(self, tag, row: Row, rhs: NPoly) -> bool:
        row, rhs = self._reduce(row, rhs)
        if not row:
            if rhs:
                raise Inconsistent(tag, rhs)
            return False
        col = next((c for c in self._ordered(row) if row[c].is_constant()), None)
        if col is None:
            self.deferred.append((tag, row, rhs))
            return False
        inv = Fraction(1) / row[col].constant_term()
        row = {c: v * inv for c, v in row.items()}
        rhs = rhs * inv
        for c2, (prow, prhs) in list(self.pivots.items()):
            f = prow.get(col)
            if f:
                _axpy(prow, f, row)
                self.pivots[c2] = (prow, prhs - f * rhs)
        self.pivots[col] = (row, rhs)
        self._retry_deferred()
        return True

    def _ordered(self, row: Row):
        return sorted(row, key=self._order.__getitem__)

    def _retry_deferred(self) -> None:
        pending, self.deferred = self.deferred, []
        for tag, row, rhs in pending:
            self._insert(tag, row, rhs)

    def free_columns(self) -> List[Col]:
        return [c for c in self.columns if c not in self.pivots]

    def solve(self) -> Tuple[Dict[Col, NPoly], str]:
        """Unique solution as ``({column: value}, method)``.

        ``method`` is ``"exact"`` for direct elimination and ``"sampled"`` when
        N-dependent pivots forced the interpolation fallback.
        """
        if self.deferred:
            return self._solve_sampled(), "sampled"
        if not self.is_full_rank():
            raise Underdetermined(self.free_columns())
        return {c: self.pivots[c][1] for c in self.columns}, "exact"

    # -- fallback

    def _degree_bound(self) -> int:
        entry = max((v.degree for _, r, _ in self.rows for v in r.values()), default=0)
        rhs = max((b.degree for _, _, b in self.rows), default=0)
        return max(rhs, 0) + len(self.columns) * max(entry, 0)

    def _solve_sampled(self) -> Dict[Col, NPoly]:
        bound = self._degree_bound()
        samples: List[Tuple[Fraction, Dict[Col, Fraction]]] = []
        n = 0
        last: LinearSystemError = Underdetermined(self.columns)
        while len(samples) < bound + 1:
            n += 1
            if n > 10 * (bound + 1) + 10:
                raise last
            x = Fraction(n)
            sub = SparseSystem(self.columns)
            try:
                for tag, row, rhs in self.rows:
                    sub.add({c: NPoly.const(v(x)) for c, v in row.items()}, NPoly.const(rhs(x)), tag)
                sol, _ = sub.solve()
            except LinearSystemError as exc:
                last = exc  # a root of the determinant, or a genuinely bad system
                continue
            samples.append((x, {c: v.constant_term() for c, v in sol.items()}))
        out = {c: interpolate([(x, s[c]) for x, s in samples]) for c in self.columns}
        for tag, row, rhs in self.rows:
            acc = NPOLY_ZERO
            for c, v in row.items():
                acc = acc + v * out[c]
            if acc != rhs:
                raise Inconsistent(tag, rhs - acc)
        return out


def solve(columns: Sequence[Col], rows: Sequence[Tuple[object, Row, NPoly]]) -> Dict[Col, NPoly]:
    """Solve ``rows`` (``(tag, {column: coef}, rhs)``) for a unique solution."""
    system = SparseSystem(columns)
    for tag, row, rhs in rows:
        system.add(row, rhs, tag)
    return system.solve()[0]
