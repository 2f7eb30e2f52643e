"""Operator identities checked on the monomial basis.

An identity is a pair of :data:`Expr` values; an ``Expr`` is a list of
``(coefficient, (A, B, ...))`` meaning ``coefficient * A B ...`` (B acts first,
an empty tuple is the identity).  Both sides are applied to every monomial of
weight <= W without truncating intermediate results and compared after
truncation to weight W.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .algebra import NPOLY_ONE, NPoly, TMonomial, TPolynomial, add_into, mono_str, monomials_up_to, weight
from .operators import OperatorName, apply, build

Coef = Union[int, Fraction, NPoly]
Expr = List[Tuple[Coef, Tuple[OperatorName, ...]]]


class NamedAction:
    """Action of a named operator on monomials, rebuilt on demand for heavier inputs."""

    _STEP = 6

    def __init__(self, name: OperatorName):
        self.name = name
        self._W = -1
        self._op = None
        self._cache: Dict[TMonomial, TPolynomial] = {}

    def on_monomial(self, m: TMonomial) -> TPolynomial:
        r = self._cache.get(m)
        if r is None:
            w = weight(m)
            if w > self._W:
                self._W = (w // self._STEP + 1) * self._STEP
                self._op = build(self.name, self._W)
            r = apply(self._op, TPolynomial._raw({m: NPOLY_ONE}))
            self._cache[m] = r
        return r

    def __call__(self, p: TPolynomial) -> TPolynomial:
        acc: Dict[TMonomial, NPoly] = {}
        for m, c in p.terms.items():
            add_into(acc, self.on_monomial(m).scale(c).terms)
        return TPolynomial._raw(acc)


class ActionCache:
    def __init__(self):
        self._actions: Dict[OperatorName, NamedAction] = {}

    def __getitem__(self, name: OperatorName) -> NamedAction:
        a = self._actions.get(name)
        if a is None:
            a = self._actions[name] = NamedAction(name)
        return a


def evaluate(expr: Expr, m: TMonomial, cache: ActionCache) -> TPolynomial:
    acc: Dict[TMonomial, NPoly] = {}
    for coef, ops in expr:
        if not coef:
            continue
        p = TPolynomial._raw({m: NPOLY_ONE})
        for name in reversed(ops):
            p = cache[name](p)
            if not p:
                break
        add_into(acc, p.scale(coef).terms)
    return TPolynomial._raw(acc)


@dataclass
class IdentityResult:
    label: str
    W: int
    failure: Optional[Tuple[TMonomial, TPolynomial]] = None

    @property
    def passed(self) -> bool:
        return self.failure is None

    def describe(self) -> str:
        if self.passed:
            return f"PASS {self.label}"
        m, diff = self.failure
        return f"FAIL {self.label} on {mono_str(m)}: lhs - rhs = {diff}"


def check_identity(label: str, lhs: Expr, rhs: Expr, W: int, cache: Optional[ActionCache] = None,
                   monomials: Optional[Iterable[TMonomial]] = None) -> IdentityResult:
    cache = cache or ActionCache()
    for m in (monomials_up_to(W) if monomials is None else monomials):
        diff = (evaluate(lhs, m, cache) - evaluate(rhs, m, cache)).truncate(W)
        if diff:
            return IdentityResult(label, W, (m, diff))
    return IdentityResult(label, W)


def commutator(a: OperatorName, b: OperatorName) -> Expr:
    return [(1, (a, b)), (-1, (b, a))]


def _op(family: str, k: int) -> OperatorName:
    return OperatorName(family, k)


# --------------------------------------------------------------------------- W_{1+infinity}


def winf_relations(k: int, m: int, variant: str = "KP") -> List[Tuple[str, Expr, Expr]]:
    """The five displayed commutators of J, L, M (central charge 1)."""
    J = lambda i: _op(f"J_{variant}", i)  # noqa: E731
    L = lambda i: _op(f"L_{variant}", i)  # noqa: E731
    M = lambda i: _op(f"M_{variant}", i)  # noqa: E731
    d = 1 if k == -m else 0
    F = Fraction
    return [
        (f"[J{k},J{m}]", commutator(J(k), J(m)), [(k * d, ())]),
        (f"[J{k},L{m}]", commutator(J(k), L(m)), [(k, (J(k + m),))]),
        (f"[L{k},L{m}]", commutator(L(k), L(m)), [(k - m, (L(k + m),)), (F(k * (k * k - 1), 12) * d, ())]),
        (f"[L{k},M{m}]", commutator(L(k), M(m)), [(2 * k - m, (M(k + m),)), (F(k * (k * k - 1), 6), (J(k + m),))]),
        (f"[J{k},M{m}]", commutator(J(k), M(m)), [(2 * k, (L(k + m),))]),
    ]


def check_winf(ks: Iterable[int], W: int, variants: Sequence[str] = ("KP", "MKP")) -> List[IdentityResult]:
    ks = list(ks)
    out = []
    for variant in variants:
        cache = ActionCache()
        for k in ks:
            for m in ks:
                for label, lhs, rhs in winf_relations(k, m, variant):
                    out.append(check_identity(f"{variant} {label}", lhs, rhs, W, cache))
    return out


# --------------------------------------------------------------------------- W(3), central charge 2


def _virasoro_bound(W: int) -> int:
    # a mode L_n (weight shift -2n) kills every input of weight < 2n
    return W // 2 + 3


def lambda_expr(m: int, W: int, family: str = "CalL_N") -> Expr:
    """Normal-ordered composite ``Lambda_m`` truncated to what can act below weight W.

    Ordered as ``sum_{n <= -2} L_n L_{m-n} + sum_{n >= -1} L_{m-n} L_n``
    (lowering modes to the right) minus ``3/10 (m+3)(m+2) L_m``.
    """
    L = lambda i: _op(family, i)  # noqa: E731
    R = _virasoro_bound(W)
    expr: Expr = []
    for n in range(m - R, -1):
        expr.append((1, (L(n), L(m - n))))
    for n in range(-1, R + 1):
        expr.append((1, (L(m - n), L(n))))
    expr.append((Fraction(-3, 10) * (m + 3) * (m + 2), (L(m),)))
    return expr


def w3_relations(k: int, m: int, W: int, families=("CalL_N", "CalM_N"),
                 m_norm: Fraction = Fraction(1)) -> List[Tuple[str, Expr, Expr]]:
    """Virasoro, [L, M] and [M, M] lines for modes k, m.

    ``m_norm`` is the square of the factor by which M is rescaled before the
    [M, M] line is compared (1 for the operators as built).
    """
    Lf, Mf = families
    L = lambda i: _op(Lf, i)  # noqa: E731
    M = lambda i: _op(Mf, i)  # noqa: E731
    d = 1 if k == -m else 0
    F = Fraction
    mm_rhs: Expr = [(F(k - m, 2) * c, ops) for c, ops in lambda_expr(k + m, W, Lf)]
    mm_rhs.append((F(k * (k * k - 1) * (k * k - 4), 180) * d, ()))
    mm_rhs.append(((k - m) * (F((k + m + 3) * (k + m + 2), 15) - F((k + 2) * (m + 2), 6)), (L(k + m),)))
    return [
        (f"[{Lf}{k},{Lf}{m}]", commutator(L(k), L(m)), [(k - m, (L(k + m),)), (F(k * (k * k - 1), 6) * d, ())]),
        (f"[{Lf}{k},{Mf}{m}]", commutator(L(k), M(m)), [(2 * k - m, (M(k + m),))]),
        (f"[{Mf}{k},{Mf}{m}]", [(c * m_norm, ops) for c, ops in commutator(M(k), M(m))], mm_rhs),
    ]


def w3_normalization(W: int = 6, pair: Tuple[int, int] = (3, -3)) -> Fraction:
    """Square of the rescaling of M for which the [M, M] line holds, read off one matrix element.

    Uses the N^0 coefficient of ``[M_k, M_m]`` on the constant monomial; the
    value is then asserted globally by :func:`check_w3`.
    """
    k, m = pair
    cache = ActionCache()
    lhs = evaluate(commutator(_op("CalM_N", k), _op("CalM_N", m)), (), cache).coefficient(())
    rhs = evaluate(w3_relations(k, m, W)[2][2], (), cache).coefficient(())
    if not lhs.constant_term():
        raise ArithmeticError("reference matrix element vanishes")
    return rhs.constant_term() / lhs.constant_term()


def check_w3(pairs: Iterable[Tuple[int, int]], W: int, which=("LL", "LM", "MM"),
             m_norm: Fraction = Fraction(1)) -> List[IdentityResult]:
    cache = ActionCache()
    out = []
    pos = {"LL": 0, "LM": 1, "MM": 2}
    for k, m in pairs:
        rels = w3_relations(k, m, W, m_norm=m_norm)
        for tag in which:
            label, lhs, rhs = rels[pos[tag]]
            out.append(check_identity(label, lhs, rhs, W, cache))
    return out


def check_constraint_algebra(pairs: Iterable[Tuple[int, int]], W: int) -> List[IdentityResult]:
    """``[Lsf_k, Mstar_l] = 2(2k - l) Mstar_{k+l}`` with independent k and l."""
    cache = ActionCache()
    out = []
    for k, l in pairs:
        lhs = commutator(_op("Lsf", k), _op("Mstar", l))
        rhs = [(2 * (2 * k - l), (_op("Mstar", k + l),))]
        out.append(check_identity(f"[Lsf{k},Mstar{l}]", lhs, rhs, W, cache))
    return out


# --------------------------------------------------------------------------- proportionality


@dataclass
class ProportionalityReport:
    family: str
    reference: str
    constant: Optional[NPoly]
    agree: List[int] = field(default_factory=list)
    disagree: List[int] = field(default_factory=list)


def proportionality(family: str, reference: str, ks: Iterable[int], W: int) -> ProportionalityReport:
    """Find c with ``family_k = c * reference_k`` on the basis, for each k in ks.

    The constant is read from the first nonzero matrix element of the first k
    and then required to hold for every matrix element of every k.
    """
    cache = ActionCache()
    rep = ProportionalityReport(family, reference, None)
    for k in ks:
        A, B = cache[_op(family, k)], cache[_op(reference, k)]
        ok = True
        for m in monomials_up_to(W):
            a, b = A.on_monomial(m).truncate(W), B.on_monomial(m).truncate(W)
            if rep.constant is None:
                for mm, y in b.terms.items():
                    x = a.terms.get(mm)
                    if x is not None and y.is_constant() and x.is_constant():
                        rep.constant = NPoly.const(x.constant_term() / y.constant_term())
                        break
                if rep.constant is None and (a or b):
                    continue
            if rep.constant is not None and a != b.scale(rep.constant):
                ok = False
                break
        (rep.agree if ok else rep.disagree).append(k)
    return rep


# --------------------------------------------------------------------------- KW reduction


def kw_reduction_expr(k: int) -> Expr:
    """``1/2 L_{2k} - 1/2 J_{2k+3} + 1/16 delta_{k,0}`` in KP generators."""
    return [(Fraction(1, 2), (_op("L_KP", 2 * k),)), (Fraction(-1, 2), (_op("J_KP", 2 * k + 3),)),
            (Fraction(1, 16) if k == 0 else 0, ())]


def odd_part(p: TPolynomial) -> TPolynomial:
    return TPolynomial._raw({m: c for m, c in p.terms.items() if all(i % 2 for i in m)})


def check_kw_reduction(ks: Iterable[int], W: int) -> List[IdentityResult]:
    """At N = 0 the closed-theory Virasoro operators agree with the KP form on odd monomials.

    The KP form is undilatoned; its t_3-shift appears as ``-1/2 J_{2k+3}``.
    Outputs are compared on odd-variable monomials only (the even part of
    ``L_{2k}`` acts on directions a KdV tau-function does not depend on).
    """
    cache = ActionCache()
    odd_monos = [m for m in monomials_up_to(W) if all(i % 2 for i in m)]
    out = []
    for k in ks:
        lhs = [(1, (_op("KW_CalL", k),))]
        rhs = kw_reduction_expr(k)
        res = IdentityResult(f"KW_CalL{k} vs KP form", W)
        for m in odd_monos:
            a = odd_part(evaluate(lhs, m, cache).truncate(W))
            b = odd_part(evaluate(rhs, m, cache).truncate(W))
            if a != b:
                res.failure = (m, a - b)
                break
        out.append(res)
    return out


# --------------------------------------------------------------------------- grading


def check_shift(name: OperatorName, shift: int, W: int) -> IdentityResult:
    """Every basis monomial m of weight <= W is sent to a polynomial homogeneous of weight(m) + shift."""
    label = f"{name} shifts weight by {shift}"
    if build(name, W).weight_shift != shift:
        return IdentityResult(f"{label} (declared {build(name, W).weight_shift})", W, ((), TPolynomial()))
    act = NamedAction(name)
    for m in monomials_up_to(W):
        out = act.on_monomial(m)
        bad = {mm: c for mm, c in out.terms.items() if weight(mm) != weight(m) + shift}
        if bad:
            return IdentityResult(label, W, (m, TPolynomial._raw(bad)))
    return IdentityResult(label, W)
