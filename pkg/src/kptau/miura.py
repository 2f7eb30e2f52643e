"""W(3) generators from the Miura product over sl(3) weight vectors.

``R_3(u) = -:prod_m (u - h_m . J):`` is expanded as a polynomial in u and two
commuting symbols J1, J2 (normal ordering makes the currents commute), then
the twisted substitution

    J1^2 -> CalJ_o^2 + 1/(8 x^2),    J2 -> CalJ_e

turns the u^1 and u^0 coefficients into generating functions of operators.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Tuple

from .algebra import SurdPoly
from .modes import CALJ_E, CALJ_O, FieldExpr

Poly3 = Dict[Tuple[int, int, int], SurdPoly]  # (power of u, power of J1, power of J2) -> coef


def weight_vectors() -> List[Tuple[SurdPoly, SurdPoly]]:
    """Weights of the fundamental representation of sl(3) in an orthonormal basis."""
    r2 = SurdPoly.sqrt(Fraction(1, 2))
    r6 = SurdPoly.sqrt(Fraction(1, 6))
    return [(r2, r6), (-r2, r6), (SurdPoly(), r6 * -2)]


def dot(a: Tuple[SurdPoly, SurdPoly], b: Tuple[SurdPoly, SurdPoly]) -> SurdPoly:
    return a[0] * b[0] + a[1] * b[1]


def _mul(p: Poly3, q: Poly3) -> Poly3:
    out: Poly3 = {}
    for (a1, b1, c1), x in p.items():
        for (a2, b2, c2), y in q.items():
            k = (a1 + a2, b1 + b2, c1 + c2)
            out[k] = out[k] + x * y if k in out else x * y
    return {k: v for k, v in out.items() if v}


def miura_polynomial() -> Poly3:
    """``R_3(u)`` as a polynomial in (u, J1, J2)."""
    R: Poly3 = {(0, 0, 0): SurdPoly.of(1)}
    for h1, h2 in weight_vectors():
        factor = {(1, 0, 0): SurdPoly.of(1), (0, 1, 0): -h1, (0, 0, 1): -h2}
        R = _mul(R, {k: v for k, v in factor.items() if v})
    return {k: -v for k, v in R.items()}


def u_coefficient(R: Poly3, power: int) -> Dict[Tuple[int, int], SurdPoly]:
    return {(b, c): v for (a, b, c), v in R.items() if a == power}


def twisted_substitution(poly: Dict[Tuple[int, int], SurdPoly]) -> FieldExpr:
    """Apply J1^2 -> CalJ_o^2 + x^-2/8, J2 -> CalJ_e to a polynomial in (J1, J2)."""
    j1sq = FieldExpr.current(CALJ_O) * FieldExpr.current(CALJ_O) + FieldExpr.power(-2, Fraction(1, 8))
    je = FieldExpr.current(CALJ_E)
    out = FieldExpr()
    for (e1, e2), c in poly.items():
        if e1 % 2:
            raise ValueError(f"odd power J1^{e1} cannot be substituted")
        out = out + (j1sq ** (e1 // 2)) * (je ** e2) * c
    return out


def miura_generators() -> Tuple[FieldExpr, FieldExpr]:
    """Generating functions ``(L(x), M(x))`` read off from ``R_3 = -u^3 + u L + M``."""
    R = miura_polynomial()
    if u_coefficient(R, 3) != {(0, 0): SurdPoly.of(-1)}:
        raise AssertionError("leading coefficient of R_3 is not -u^3")
    if u_coefficient(R, 2):
        raise AssertionError("u^2 coefficient of R_3 does not vanish")
    return twisted_substitution(u_coefficient(R, 1)), twisted_substitution(u_coefficient(R, 0))
