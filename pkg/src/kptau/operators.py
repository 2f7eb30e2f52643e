"""Builders for every named constraint operator, and their exact action.

Families
--------
``J_KP, L_KP, M_KP, J_MKP, L_MKP, M_MKP``
    W_{1+inf} generators: modes of ``J``, ``1/2 :J^2:``, ``1/3 :J^3:``.
``Lsf, Msf``
    Virasoro and W(3) constraints written with the KP generators.
``Mprime, Mstar``
    ``Msf_k - (k+2) N Lsf_k`` and its correction by ``v_e(z) * L(z)``.
``CalL_N, CalM_N``
    Modes of the twisted two-boson W(3) currents.
``KW_CalL``
    Virasoro operators of the closed (N = 0) theory from the odd current alone.
``R3_L, R3_M``
    The same W(3) currents obtained from the Miura product (see :mod:`.miura`).
``D, W1, W2``
    Degree operator and the two cut-and-join operators.

Every explicit ``t_k`` or ``d/dt_k`` with ``k <= 0`` is zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

from .algebra import (
    NPOLY_ONE,
    NPoly,
    SurdPoly,
    TMonomial,
    TPolynomial,
    monomials_up_to,
    sub_multisets,
)
from .miura import dot, miura_generators, weight_vectors
from .modes import (
    CALJ_E,
    CALJ_O,
    CALJ_O_NOSHIFT,
    J_KP,
    J_MKP,
    Current,
    FieldExpr,
    OperatorExpr,
)

N = NPoly.N()

FAMILIES = (
    "J_KP", "L_KP", "M_KP", "J_MKP", "L_MKP", "M_MKP",
    "Lsf", "Msf", "Mprime", "Mstar",
    "CalL_N", "CalM_N", "KW_CalL", "R3_L", "R3_M",
    "D", "W1", "W2",
)
_UNINDEXED = ("D", "W1", "W2")


@dataclass(frozen=True)
class OperatorName:
    family: str
    index: Optional[int] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown operator family {self.family!r}")
        if (self.index is None) != (self.family in _UNINDEXED):
            raise ValueError(f"{self.family} {'takes no' if self.family in _UNINDEXED else 'needs an'} index")

    def __str__(self) -> str:
        return self.family if self.index is None else f"{self.family}[{self.index}]"

    @classmethod
    def parse(cls, text: str) -> "OperatorName":
        """``"Lsf[2]"`` or ``"W1"``."""
        text = text.strip()
        if "[" in text:
            fam, idx = text[:-1].split("[")
            return cls(fam, int(idx))
        return cls(text)


# --------------------------------------------------------------------------- field expressions


def _f(c: Current) -> FieldExpr:
    return FieldExpr.current(c)


def _x(p, coef=1) -> FieldExpr:
    return FieldExpr.power(p, coef)


_SQ = SurdPoly.sqrt


def kp_fields(current: Current) -> Tuple[FieldExpr, FieldExpr, FieldExpr]:
    J = _f(current)
    return J, J * J * Fraction(1, 2), J * J * J * Fraction(1, 3)


def free_field_generators() -> Tuple[FieldExpr, FieldExpr]:
    """``(L^N(x), M^N(x))`` written directly from the two twisted currents."""
    Jo, Je = _f(CALJ_O), _f(CALJ_E)
    odd_sq = Jo * Jo + _x(-2, Fraction(1, 8))
    L = (odd_sq + Je * Je) * Fraction(1, 2)
    M = (Je * odd_sq - Je * Je * Je * Fraction(1, 3)) * _SQ(Fraction(1, 6))
    return L, M


def kw_generator() -> FieldExpr:
    Jo = _f(CALJ_O)
    return Jo * Jo * Fraction(1, 2) + _x(-2, Fraction(1, 16))


def cut_join_fields() -> Tuple[FieldExpr, FieldExpr]:
    """Residue integrands of the cut-and-join operators (times the 1/(2 pi i) factor).

    ``v_o(sqrt x) = sqrt2 x^(1/2) CalJ_o'^-(x)`` and
    ``v_e(sqrt x) = sqrt6 x^(1/2) CalJ_e^-(x)``, with the odd current taken
    without dilaton shift.
    """
    Jo, Je = _f(CALJ_O_NOSHIFT), _f(CALJ_E)
    vo = _f(CALJ_O_NOSHIFT.minus()) * _x(Fraction(1, 2), _SQ(2))
    ve = _f(CALJ_E.minus()) * _x(Fraction(1, 2), _SQ(6))
    odd_sq = Jo * Jo + _x(-2, Fraction(1, 8))
    w1 = (vo * (odd_sq + Je * Je) + ve * Je * Jo * (4 * _SQ(Fraction(1, 3)))) * Fraction(1, 3)
    w2 = ve * _x(Fraction(-1, 2)) * (Je * odd_sq - Je * Je * Je * Fraction(1, 3)) \
        * (_SQ(2) * _SQ(Fraction(1, 3)) * Fraction(-2, 3))
    return w1, w2


def degree_field() -> FieldExpr:
    """Integrand of the free-field form of the degree operator."""
    Jo, Je = _f(CALJ_O_NOSHIFT), _f(CALJ_E)
    vo = _f(CALJ_O_NOSHIFT.minus()) * _x(Fraction(1, 2), _SQ(2))
    ve = _f(CALJ_E.minus()) * _x(Fraction(1, 2), _SQ(6))
    return (ve * Je * _SQ(Fraction(2, 3)) + vo * Jo * _SQ(2)) * _x(Fraction(1, 2)) * Fraction(1, 3)


# --------------------------------------------------------------------------- builders


def _d(*idx: int, c=1, shift: Optional[int] = None) -> OperatorExpr:
    return OperatorExpr.d(*idx, c=c, shift=shift)


def _kp(kind: str, k: int, W: int, mkp: bool = False) -> OperatorExpr:
    J, L, M = kp_fields(J_MKP if mkp else J_KP)
    field, spin = {"J": (J, 1), "L": (L, 2), "M": (M, 3)}[kind]
    return field.mode(-k - spin, W).rational()


def _as(op: OperatorExpr, shift: int) -> OperatorExpr:
    return op.with_shift(shift) if op else OperatorExpr({}, shift, op.W)


def _build_Lsf(k: int, W: int) -> OperatorExpr:
    s = -2 * k
    op = _kp("L", 2 * k, W)
    op = op - _as(_d(2 * k + 3), s)
    op = op + _d(2 * k, c=3 * N, shift=s)
    for j in range(1, k):
        op = op + _d(2 * j, 2 * k - 2 * j, shift=s)
    if k == 0:
        op = op + OperatorExpr.scalar(Fraction(1, 8) + Fraction(3, 2) * N * N, s)
    if k == -1:
        op = op + OperatorExpr.t(2, c=2 * N, shift=s)
    return op.restrict_derivs(W)


def _build_Msf(k: int, W: int) -> OperatorExpr:
    s = -2 * k
    J = lambda i: _as(_kp("J", i, W), s)  # noqa: E731
    L = lambda i: _as(_kp("L", i, W), s)  # noqa: E731
    op = _kp("M", 2 * k, W)
    op = op - L(2 * k + 3) * 2
    op = op + J(2 * k + 6)
    op = op + J(2 * k) * (3 * (k + 1) * N * N + Fraction(1, 4))
    op = op + (L(2 * k) - J(2 * k + 3)) * ((k + 4) * N)
    if k == 0:
        op = op + OperatorExpr.scalar(2 * (N * N + Fraction(1, 4)) * N, s)
    if k == -1:
        op = op + OperatorExpr.t(2, c=4 * N * N, shift=s)
    if k == -2:
        op = op + OperatorExpr.t(4, c=16 * N * N, shift=s)
    for j in range(1, k):
        op = op + _d(2 * j, 2 * k - 2 * j, c=(k - 2) * N, shift=s)
    for i in range(1, k + 1):
        for j in range(1, k + 1 - i):
            l = k - i - j
            if l >= 1:
                op = op - _d(2 * i, 2 * j, 2 * l, c=Fraction(4, 3), shift=s)
    return op.restrict_derivs(W)


def _build_Mprime(k: int, W: int) -> OperatorExpr:
    return build(OperatorName("Msf", k), W) - build(OperatorName("Lsf", k), W) * ((k + 2) * N)


def _build_Mstar(k: int, W: int) -> OperatorExpr:
    op = build(OperatorName("Mprime", k), W)
    j = 1
    while 2 * (k + j) <= W:
        lk = build(OperatorName("Lsf", k + j), W)
        op = op - lk.left_mul_t(2 * j, Fraction(8, 3) * j)
        j += 1
    return op.restrict_derivs(W)


def _build_degree(W: int) -> OperatorExpr:
    terms = {((k,), (k,)): NPoly.const(Fraction(k, 3)) for k in range(1, W + 1)}
    return OperatorExpr(terms, 0, W)


@lru_cache(maxsize=None)
def build(name: OperatorName, W: int) -> OperatorExpr:
    """Operator ``name`` truncated so that it is exact on inputs of weight <= W."""
    if W < 0:
        raise ValueError("W must be >= 0")
    fam, k = name.family, name.index
    if fam in ("J_KP", "L_KP", "M_KP", "J_MKP", "L_MKP", "M_MKP"):
        return _kp(fam[0], k, W, mkp=fam.endswith("MKP"))
    if fam == "Lsf":
        return _build_Lsf(k, W)
    if fam == "Msf":
        return _build_Msf(k, W)
    if fam == "Mprime":
        return _build_Mprime(k, W)
    if fam == "Mstar":
        if k < -2:
            raise ValueError("Mstar is defined for k >= -2")
        return _build_Mstar(k, W)
    if fam == "CalL_N":
        return free_field_generators()[0].mode(-k - 2, W).rational()
    if fam == "CalM_N":
        return free_field_generators()[1].mode(-k - 3, W).rational()
    if fam == "KW_CalL":
        return kw_generator().mode(-k - 2, W).rational()
    if fam == "R3_L":
        return _miura()[0].mode(-k - 2, W).rational()
    if fam == "R3_M":
        return _miura()[1].mode(-k - 3, W).rational()
    if fam == "D":
        return _build_degree(W)
    if fam == "W1":
        return cut_join_fields()[0].mode(-1, W).rational()
    if fam == "W2":
        return cut_join_fields()[1].mode(-1, W).rational()
    raise ValueError(f"unknown operator {name}")  # pragma: no cover


@lru_cache(maxsize=None)
def _miura():
    return miura_generators()


def build_family(family: str, indices: Iterable[int], W: int) -> Dict[int, OperatorExpr]:
    return {k: build(OperatorName(family, k), W) for k in indices}


# --------------------------------------------------------------------------- action


def apply(op: OperatorExpr, p: TPolynomial, W: Optional[int] = None) -> TPolynomial:
    """Exact action of op on p: derivatives first, then multiplications.

    Output monomials of weight > W are dropped (``W=None`` keeps all).  Raises
    ``ValueError`` when p has a monomial heavier than the truncation weight
    of op, since the result would then be incomplete.
    """
    idx = op.index()
    order = op.max_derivative_order()
    out: Dict[TMonomial, NPoly] = {}
    for m, c in p.terms.items():
        wm = sum(m)
        if op.W is not None and wm > op.W:
            raise ValueError(f"operator truncated at weight {op.W} applied to a weight-{wm} monomial")
        for d, rest, f in sub_multisets(m, order):
            lst = idx.get(d)
            if not lst:
                continue
            wrest = wm - sum(d)
            cf = c * f
            for mu, wmu, coef in lst:
                if W is not None and wrest + wmu > W:
                    continue
                r = tuple(sorted(rest + mu)) if mu else rest
                v = coef * cf
                if r in out:
                    v = out[r] + v
                    if v:
                        out[r] = v
                    else:
                        del out[r]
                elif v:
                    out[r] = v
    return TPolynomial._raw(out, W)


class BasisAction:
    """Memoised action of one operator on single monomials."""

    def __init__(self, op: OperatorExpr):
        self.op = op
        self._cache: Dict[TMonomial, TPolynomial] = {}

    def on_monomial(self, m: TMonomial) -> TPolynomial:
        r = self._cache.get(m)
        if r is None:
            r = apply(self.op, TPolynomial._raw({m: NPOLY_ONE}))
            self._cache[m] = r
        return r

    def __call__(self, p: TPolynomial) -> TPolynomial:
        acc: Dict[TMonomial, NPoly] = {}
        for m, c in p.terms.items():
            for m2, c2 in self.on_monomial(m).terms.items():
                v = c2 * c
                if m2 in acc:
                    v = acc[m2] + v
                    if v:
                        acc[m2] = v
                    else:
                        del acc[m2]
                elif v:
                    acc[m2] = v
        return TPolynomial._raw(acc)


def max_t_shift(op: OperatorExpr) -> int:
    return max(op.t_shifts(), default=0)


def commutator_on_basis(a, b, W: int, truncate: bool = True) -> Dict[TMonomial, TPolynomial]:
    """``(AB - BA)(m)`` for every monomial m of weight <= W.

    a and b are operator names (or already built operators whose truncation
    weight is large enough).  With ``truncate`` the values are cut at weight W.
    """
    A0 = build(a, W) if isinstance(a, OperatorName) else a
    B0 = build(b, W) if isinstance(b, OperatorName) else b
    wa = W + max(0, max_t_shift(B0))
    wb = W + max(0, max_t_shift(A0))
    A = build(a, wa) if isinstance(a, OperatorName) else A0
    B = build(b, wb) if isinstance(b, OperatorName) else B0
    actA, actB = BasisAction(A), BasisAction(B)
    out = {}
    for m in monomials_up_to(W):
        mono = TPolynomial._raw({m: NPOLY_ONE})
        val = actA(actB(mono)) - actB(actA(mono))
        out[m] = val.truncate(W) if truncate else val
    return out


def action_on_basis(op: OperatorExpr, W: int) -> Dict[TMonomial, TPolynomial]:
    act = BasisAction(op)
    return {m: act.on_monomial(m) for m in monomials_up_to(W)}


# --------------------------------------------------------------------------- Miura cross-check


@dataclass
class MiuraReport:
    W: int
    modes: List[int]
    mismatches: List[Tuple[str, int, TMonomial]]
    h_gram: List[List[SurdPoly]]
    h_sum: Tuple[SurdPoly, SurdPoly]

    @property
    def passed(self) -> bool:
        return not self.mismatches


def check_miura_match(W: int, modes: Iterable[int] = range(-3, 4)) -> MiuraReport:
    """Compare the Miura-built W(3) modes with the directly written ones on the basis."""
    hs = weight_vectors()
    gram = [[dot(a, b) for b in hs] for a in hs]
    hsum = (hs[0][0] + hs[1][0] + hs[2][0], hs[0][1] + hs[1][1] + hs[2][1])
    mismatches = []
    modes = list(modes)
    for k in modes:
        for miura, direct in (("R3_L", "CalL_N"), ("R3_M", "CalM_N")):
            A = BasisAction(build(OperatorName(miura, k), W))
            B = BasisAction(build(OperatorName(direct, k), W))
            for m in monomials_up_to(W):
                if A.on_monomial(m) != B.on_monomial(m):
                    mismatches.append((direct, k, m))
                    break
    return MiuraReport(W, modes, mismatches, gram, hsum)
