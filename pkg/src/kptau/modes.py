"""Bosonic currents as families of mode operators, and normal-ordered products.

Mode indices are stored doubled (``d = 2m``) so the half-integer modes of the
twisted odd current stay integral.  Two gradings are in use:

* ``z``-currents (``J_KP``, ``J_MKP``, ``J_o``, ``J_e``, ``nabla_e``): the
  generating function is ``sum_m J_m z^(-m-1)`` with integer m, and mode m
  acts on t_|m|.
* ``x``-currents (``CalJ_o``, ``CalJ_e`` and variants), where ``x = z^2``:
  mode m (integer or half-integer) acts on t_|2m|.

Every mode is a sum of elementary operators: a multiplication by t_a, a
derivative in t_a, or a scalar.  The dilaton shift t_3 -> t_3 - 1/3 turns one
multiplication mode of the odd current into "multiplication plus scalar"; that
scalar carries one inverse power of hbar so that every operator stays
homogeneous once hbar is restored (hbar has weight -3).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra import (
    NPOLY_ZERO,
    NPoly,
    RationalLike,
    SurdPoly,
    TMonomial,
    mono_mul,
    mono_str,
    rational,
    rational_str,
)

Coefficient = Union[NPoly, SurdPoly]


# --------------------------------------------------------------------------- elementary ops


@dataclass(frozen=True)
class ElementaryOp:
    """``scale * t_var`` (kind "mul"), ``scale * d/dt_var`` ("der") or ``scale`` ("scalar")."""

    kind: str
    scale: SurdPoly
    var: Optional[int] = None
    hbar: int = 0  # number of 1/hbar factors carried by the scale

    def __post_init__(self):
        if self.kind not in ("mul", "der", "scalar"):
            raise ValueError(f"unknown elementary kind {self.kind!r}")
        if self.kind == "scalar":
            if self.var is not None:
                raise ValueError("scalar ops carry no variable")
        elif self.var is None or self.var < 1:
            raise ValueError("mul/der ops need a variable index >= 1")
        if self.scale.is_zero():
            raise ValueError("elementary op with zero scale")


def _mul(a: int, scale) -> ElementaryOp:
    return ElementaryOp("mul", SurdPoly.of(scale), a)


def _der(a: int, scale) -> ElementaryOp:
    return ElementaryOp("der", SurdPoly.of(scale), a)


def _scalar(scale, hbar: int = 0) -> ElementaryOp:
    return ElementaryOp("scalar", SurdPoly.of(scale), None, hbar)


# --------------------------------------------------------------------------- currents

_SQRT_HALF = SurdPoly.sqrt(Fraction(1, 2))
_SQRT_2_3 = SurdPoly.sqrt(Fraction(2, 3))
_SQRT_3_2 = SurdPoly.sqrt(Fraction(3, 2))
_N = SurdPoly.of(NPoly.N())

_KNOWN = {
    # name: grading of the generating function
    "J_KP": "z",
    "J_MKP": "z",
    "J_o": "z",
    "J_e": "z",
    "nabla_e": "z",
    "CalJ_o": "x",
    "CalJ_e": "x",
}


@dataclass(frozen=True, order=True)
class Current:
    """One bosonic current.

    ``dilaton_shift`` only matters for the odd currents.  ``part`` restricts
    the current to its creation (``"-"``, multiplication) modes; ``"all"``
    keeps every mode.
    """

    name: str
    dilaton_shift: bool = False
    part: str = "all"

    def __post_init__(self):
        if self.name not in _KNOWN:
            raise ValueError(f"unknown current {self.name!r}")
        if self.part not in ("all", "-"):
            raise ValueError(f"unknown part {self.part!r}")

    @property
    def grading(self) -> str:
        return _KNOWN[self.name]

    def admits(self, d: int) -> bool:
        """Whether doubled mode index d belongs to this current."""
        if self.part == "-" and d >= 0:
            return False
        if self.grading == "z":
            if d % 2:
                return False
            m = d // 2
            if self.name == "J_o":
                return m % 2 == 1
            if self.name in ("J_e", "nabla_e"):
                return m % 2 == 0
            return True
        if self.name == "CalJ_o":
            return d % 2 == 1
        return d % 2 == 0

    def mode_weight(self, d: int) -> int:
        """Index of the time variable touched by mode d."""
        return abs(d) // 2 if self.grading == "z" else abs(d)

    def minus(self) -> "Current":
        return Current(self.name, self.dilaton_shift, "-")

    def __str__(self) -> str:
        s = self.name
        if self.name in ("J_o", "CalJ_o") and not self.dilaton_shift:
            s += "'"
        return s + ("^-" if self.part == "-" else "")


J_KP = Current("J_KP")
J_MKP = Current("J_MKP")
J_O = Current("J_o", dilaton_shift=True)
J_E = Current("J_e")
NABLA_E = Current("nabla_e")
CALJ_O = Current("CalJ_o", dilaton_shift=True)
CALJ_O_NOSHIFT = Current("CalJ_o", dilaton_shift=False)
CALJ_E = Current("CalJ_e")

CURRENTS = {
    "J_KP": J_KP,
    "J_MKP": J_MKP,
    "J_o": J_O,
    "J_e": J_E,
    "CalJ_o": CALJ_O,
    "CalJ_o_noshift": CALJ_O_NOSHIFT,
    "CalJ_e": CALJ_E,
}


def current_mode(c: Current, d: int) -> Tuple[ElementaryOp, ...]:
    """Elementary operators making up mode ``d/2`` of current c.

    Returns an empty tuple for a zero mode (e.g. the KP zero mode).  Raises
    ``ValueError`` if d has the wrong parity for c.
    """
    if not Current(c.name, c.dilaton_shift).admits(d):
        raise ValueError(f"mode index {Fraction(d, 2)} not admitted by {c}")
    if c.part == "-" and d >= 0:
        return ()
    if c.grading == "z":
        m = d // 2
        if m > 0:
            return (_der(m, 1),)
        if m == 0:
            if c.name in ("J_MKP", "J_e", "nabla_e"):
                return (_scalar(_N),)
            return ()
        if c.name == "nabla_e":
            return ()
        a = -m
        ops = [_mul(a, a)]
        if c.name == "J_o" and c.dilaton_shift and a == 3:
            ops.append(_scalar(-1, hbar=1))
        return tuple(ops)
    if c.name == "CalJ_o":
        if d > 0:
            return (_der(d, _SQRT_HALF),)
        a = -d
        ops = [_mul(a, _SQRT_HALF * a)]
        if c.dilaton_shift and a == 3:
            ops.append(_scalar(-_SQRT_HALF, hbar=1))
        return tuple(ops)
    # CalJ_e
    if d > 0:
        return (_der(d, _SQRT_3_2),)
    if d == 0:
        return (_scalar(_SQRT_3_2 * _N),)
    a = -d
    return (_mul(a, _SQRT_2_3 * Fraction(a, 2)),)


# --------------------------------------------------------------------------- operator expressions

TermKey = Tuple[TMonomial, TMonomial]  # (multiplications, derivatives)


class OperatorExpr:
    """Finite normal-ordered differential operator in the times.

    ``terms`` maps ``(mults, derivs)`` to a coefficient, meaning
    ``coef * t^mults * d^derivs`` with every derivative to the right.
    ``weight_shift`` is the homogeneous shift once hbar is restored: a term
    with t-shift ``weight(mults) - weight(derivs)`` carries
    ``(weight_shift - t_shift) / 3`` inverse powers of hbar.

    ``W`` is the input weight up to which this (truncated) expression agrees
    with the infinite operator it stands for; ``None`` means exact.
    """

    __slots__ = ("terms", "weight_shift", "W", "_index")

    def __init__(self, terms: Optional[Mapping[TermKey, Coefficient]] = None,
                 weight_shift: int = 0, W: Optional[int] = None):
        clean: Dict[TermKey, Coefficient] = {}
        for (mu, de), c in (terms or {}).items():
            key = (tuple(sorted(mu)), tuple(sorted(de)))
            if key in clean:
                c = clean[key] + c
            if c:
                clean[key] = c
            else:
                clean.pop(key, None)
        for key in clean:
            self._check_term(key, weight_shift)
        self.terms = clean
        self.weight_shift = weight_shift
        self.W = W
        self._index = None

    @staticmethod
    def _check_term(key: TermKey, shift: int) -> None:
        gap = shift - (sum(key[0]) - sum(key[1]))
        if gap % 3 or gap < 0:
            raise ValueError(
                f"term {key} has t-shift {sum(key[0]) - sum(key[1])}, incompatible with weight shift {shift}")

    # -- constructors
    @classmethod
    def scalar(cls, c, shift: int = 0) -> "OperatorExpr":
        c = _coef(c)
        return cls({((), ()): c} if c else {}, shift)

    @classmethod
    def t(cls, a: int, c=1, shift: Optional[int] = None) -> "OperatorExpr":
        """``c * t_a``; zero when a <= 0."""
        shift = a if shift is None else shift
        if a <= 0:
            return cls({}, shift)
        return cls({((a,), ()): _coef(c)}, shift)

    @classmethod
    def d(cls, *idx: int, c=1, shift: Optional[int] = None) -> "OperatorExpr":
        """``c * d/dt_i d/dt_j ...``; zero if any index <= 0."""
        shift = -sum(idx) if shift is None else shift
        if any(i <= 0 for i in idx):
            return cls({}, shift)
        return cls({((), tuple(idx)): _coef(c)}, shift)

    # -- queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def hbar_order(self, key: TermKey) -> int:
        return (self.weight_shift - (sum(key[0]) - sum(key[1]))) // 3

    def components(self) -> Dict[int, "OperatorExpr"]:
        """Split by hbar order: ``{h: part whose t-shift is weight_shift - 3h}``."""
        out: Dict[int, Dict[TermKey, Coefficient]] = {}
        for key, c in self.terms.items():
            out.setdefault(self.hbar_order(key), {})[key] = c
        return {h: OperatorExpr(t, self.weight_shift - 3 * h, self.W) for h, t in sorted(out.items())}

    def t_shifts(self) -> List[int]:
        return sorted({sum(k[0]) - sum(k[1]) for k in self.terms})

    def max_derivative_order(self) -> int:
        return max((len(k[1]) for k in self.terms), default=0)

    def is_rational(self) -> bool:
        return all(not isinstance(c, SurdPoly) or c.is_rational() for c in self.terms.values())

    def rational(self) -> "OperatorExpr":
        """Same operator with NPoly coefficients; raises if a square root survives."""
        out = {}
        for key, c in self.terms.items():
            out[key] = c.rational() if isinstance(c, SurdPoly) else c
        return OperatorExpr(out, self.weight_shift, self.W)

    def is_normal_ordered(self) -> bool:
        return True  # by construction: (mults, derivs) keys

    def index(self) -> Dict[TMonomial, List[Tuple[TMonomial, int, NPoly]]]:
        """``{derivs: [(mults, weight(mults), coef)]}`` for fast application."""
        if self._index is None:
            idx: Dict[TMonomial, list] = {}
            for (mu, de), c in self.terms.items():
                if isinstance(c, SurdPoly):
                    c = c.rational()
                idx.setdefault(de, []).append((mu, sum(mu), c))
            self._index = idx
        return self._index

    # -- arithmetic
    def _combine_W(self, other: "OperatorExpr") -> Optional[int]:
        ws = [w for w in (self.W, other.W) if w is not None]
        return min(ws) if ws else None

    def __add__(self, other: "OperatorExpr") -> "OperatorExpr":
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        if not other.terms:
            return OperatorExpr(self.terms, self.weight_shift, self._combine_W(other))
        if not self.terms:
            return OperatorExpr(other.terms, other.weight_shift, self._combine_W(other))
        if other.weight_shift != self.weight_shift:
            raise ValueError(f"adding operators of weight shift {self.weight_shift} and {other.weight_shift}")
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out[key] + c if key in out else c
        return OperatorExpr(out, self.weight_shift, self._combine_W(other))

    def __neg__(self) -> "OperatorExpr":
        return OperatorExpr({k: -c for k, c in self.terms.items()}, self.weight_shift, self.W)

    def __sub__(self, other: "OperatorExpr") -> "OperatorExpr":
        return self + (-other)

    def __mul__(self, s) -> "OperatorExpr":
        s = _coef(s)
        return OperatorExpr({k: c * s for k, c in self.terms.items()}, self.weight_shift, self.W)

    __rmul__ = __mul__

    def left_mul_t(self, a: int, c=1) -> "OperatorExpr":
        """``c * t_a * self`` (stays normal ordered)."""
        c = _coef(c)
        if a <= 0:
            return OperatorExpr({}, self.weight_shift + max(a, 0), self.W)
        return OperatorExpr({(mono_mul((a,), mu), de): coef * c for (mu, de), coef in self.terms.items()},
                            self.weight_shift + a, self.W)

    def with_shift(self, shift: int) -> "OperatorExpr":
        """Re-declare the homogeneous shift (moves terms into higher hbar orders)."""
        return OperatorExpr(self.terms, shift, self.W)

    def with_W(self, W: Optional[int]) -> "OperatorExpr":
        return OperatorExpr(self.terms, self.weight_shift, W)

    def eval_N(self, n: RationalLike) -> "OperatorExpr":
        n = rational(n)
        out = {}
        for key, c in self.rational().terms.items():
            out[key] = NPoly.const(c(n))
        return OperatorExpr(out, self.weight_shift, self.W)

    def restrict_derivs(self, W: int) -> "OperatorExpr":
        """Drop terms that annihilate every monomial of weight <= W."""
        return OperatorExpr({k: c for k, c in self.terms.items() if sum(k[1]) <= W}, self.weight_shift,
                            W if self.W is None else min(W, self.W))

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        a = self.rational().terms if self.is_rational() else self.terms
        b = other.rational().terms if other.is_rational() else other.terms
        return a == b and (not a or self.weight_shift == other.weight_shift)

    __hash__ = None

    def __repr__(self) -> str:
        return f"OperatorExpr({len(self.terms)} terms, shift={self.weight_shift}, W={self.W})"

    def dump(self) -> str:
        """Canonical text listing, one term per line."""
        lines = []
        for (mu, de), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            coef = c.rational() if isinstance(c, SurdPoly) and c.is_rational() else c
            dpart = "" if not de else " " + "*".join(f"d{k}" for k in de)
            lines.append(f"{coef} : {mono_str(mu)}{dpart}")
        return "\n".join(lines)


def _coef(c) -> Coefficient:
    if isinstance(c, (NPoly, SurdPoly)):
        return c
    return NPoly.const(rational(c))


# --------------------------------------------------------------------------- products of modes


def _mode_tuples(cs: Sequence[Current], total: int, W: int) -> Iterable[Tuple[int, ...]]:
    """Doubled-index tuples summing to ``total`` whose derivative weight is <= W."""
    scale = 2 if cs[0].grading == "z" else 1
    bound = scale * (W + abs(total) // scale + 1)
    cands = [[d for d in range(-bound, bound + 1) if c.admits(d)] for c in cs]
    r = len(cs)

    def rec(i: int, rest: int, dw: int, acc: Tuple[int, ...]):
        if i == r - 1:
            c = cs[i]
            if c.admits(rest) and dw + (c.mode_weight(rest) if rest > 0 else 0) <= W:
                yield acc + (rest,)
            return
        for d in cands[i]:
            w = cs[i].mode_weight(d) if d > 0 else 0
            if dw + w <= W:
                yield from rec(i + 1, rest - d, dw + w, acc + (d,))

    yield from rec(0, total, 0, ())


def normal_ordered_product(cs: Sequence[Current], total: int, W: int) -> OperatorExpr:
    """Mode ``total/2`` of ``:c_1(x) ... c_r(x):`` truncated for inputs of weight <= W.

    ``total`` is the doubled mode index of the product (the sum of the doubled
    indices of the factors).  The result carries SurdPoly coefficients.
    """
    if not 1 <= len(cs) <= 4:
        raise ValueError(f"unsupported arity {len(cs)}")
    if len({c.grading for c in cs}) != 1:
        raise ValueError("cannot mix z- and x-graded currents")
    z = cs[0].grading == "z"
    shift = -(total // 2) if z else -total
    if z and total % 2:
        raise ValueError("z-graded products need an even doubled index")
    terms: Dict[TermKey, SurdPoly] = {}
    for ds in _mode_tuples(cs, total, W):
        factors = [current_mode(c, d) for c, d in zip(cs, ds)]
        if any(not f for f in factors):
            continue
        for choice in product(*factors):
            coef = SurdPoly.of(1)
            mults: List[int] = []
            derivs: List[int] = []
            for op in choice:
                coef = coef * op.scale
                if op.kind == "mul":
                    mults.append(op.var)
                elif op.kind == "der":
                    derivs.append(op.var)
            if sum(derivs) > W or coef.is_zero():
                continue
            key = (tuple(sorted(mults)), tuple(sorted(derivs)))
            terms[key] = terms[key] + coef if key in terms else coef
    return OperatorExpr(terms, shift, W)


# --------------------------------------------------------------------------- generating functions


class FieldExpr:
    """Polynomial in currents and powers of the expansion variable.

    Terms are ``coef * x^p * :c_1 ... c_r:``, keyed by ``(currents, p)``.
    Multiplication concatenates currents, so products are normal ordered
    (all currents here are free bosons; the regularisation constants are
    explicit ``x^p`` terms).
    """

    def __init__(self, terms: Optional[Mapping[Tuple[Tuple[Current, ...], Fraction], SurdPoly]] = None):
        self.terms: Dict[Tuple[Tuple[Current, ...], Fraction], SurdPoly] = {}
        for (cs, p), c in (terms or {}).items():
            key = (tuple(sorted(cs)), Fraction(p))
            c = SurdPoly.of(c)
            self.terms[key] = self.terms[key] + c if key in self.terms else c
        self.terms = {k: c for k, c in self.terms.items() if c}

    @classmethod
    def current(cls, c: Current) -> "FieldExpr":
        return cls({((c,), Fraction(0)): SurdPoly.of(1)})

    @classmethod
    def power(cls, p: RationalLike, coef=1) -> "FieldExpr":
        return cls({((), Fraction(p)): SurdPoly.of(coef)})

    def __add__(self, other) -> "FieldExpr":
        other = _as_field(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return FieldExpr(out)

    __radd__ = __add__

    def __neg__(self) -> "FieldExpr":
        return FieldExpr({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "FieldExpr":
        return self + (-_as_field(other))

    def __rsub__(self, other) -> "FieldExpr":
        return _as_field(other) - self

    def __mul__(self, other) -> "FieldExpr":
        if isinstance(other, (int, Fraction, NPoly, SurdPoly)):
            s = SurdPoly.of(other)
            return FieldExpr({k: c * s for k, c in self.terms.items()})
        other = _as_field(other)
        out: Dict = {}
        for (cs1, p1), c1 in self.terms.items():
            for (cs2, p2), c2 in other.terms.items():
                key = (tuple(sorted(cs1 + cs2)), p1 + p2)
                v = c1 * c2
                out[key] = out[key] + v if key in out else v
        return FieldExpr(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "FieldExpr":
        out = FieldExpr.power(0)
        for _ in range(e):
            out = out * self
        return out

    def mode(self, power: RationalLike, W: int, shift: Optional[int] = None) -> OperatorExpr:
        """Coefficient of ``x^power`` (resp. ``z^power``) as an operator.

        ``shift`` fixes the declared weight shift; by default it is read off
        from the homogeneous grading (currents weigh 2 in x, 1 in z).
        """
        power = Fraction(power)
        grading = {c.grading for cs, _ in self.terms for c in cs}
        if len(grading) > 1:
            raise ValueError("mixed gradings in one generating function")
        z = grading == {"z"}
        unit = 1 if z else 2
        out: Optional[OperatorExpr] = None
        for (cs, p), coef in self.terms.items():
            r = len(cs)
            expected = int(unit * (r - p + power))
            if shift is None:
                shift = expected
            if not cs:
                piece = OperatorExpr.scalar(coef, expected) if p == power else OperatorExpr({}, expected)
            else:
                msum = -power - r + p  # sum of (undoubled) mode indices
                if (2 * msum).denominator != 1:
                    continue
                piece = normal_ordered_product(cs, int(2 * msum), W) * coef
            if expected != shift:
                piece = piece.with_shift(shift)
            out = piece if out is None else out + piece.with_shift(out.weight_shift)
        if out is None:
            return OperatorExpr({}, shift or 0, W)
        return OperatorExpr(out.terms, out.weight_shift, W)

    def current_powers(self) -> List[Dict[Current, int]]:
        out = []
        for cs, _ in self.terms:
            d: Dict[Current, int] = {}
            for c in cs:
                d[c] = d.get(c, 0) + 1
            out.append(d)
        return out


def _as_field(x) -> FieldExpr:
    if isinstance(x, FieldExpr):
        return x
    if isinstance(x, Current):
        return FieldExpr.current(x)
    return FieldExpr.power(0, x)


def laurent_negative_part(family: Mapping[int, OperatorExpr], offset: int) -> Dict[int, OperatorExpr]:
    """Keep the modes k of ``sum_k A_k x^(-k-offset)`` that sit at negative powers of x."""
    return {k: op for k, op in family.items() if -k - offset <= -1}
