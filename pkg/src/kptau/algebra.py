"""Exact coefficient rings and graded sparse polynomials in the times t_1, t_2, ...

Three layers:

* ``Fraction`` (stdlib) is the rational field.
* :class:`NPoly` is a polynomial in the deformation parameter N over the rationals.
* :class:`TPolynomial` is a sparse polynomial in t_1, t_2, ... with ``NPoly``
  coefficients.  The weight of t_k is k.

Monomials in the times are plain sorted tuples of variable indices with
repetition, so ``t_1**2 * t_2`` is ``(1, 1, 2)``.  This keeps them hashable,
cheap to merge, and makes the weight a plain ``sum``.

:class:`SurdPoly` extends ``NPoly`` by square roots of squarefree integers.  It is
only used while assembling free-field operators whose currents carry factors such
as sqrt(3/2); finished operators are converted back to ``NPoly``.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

RationalLike = Union[int, Fraction, str]
TMonomial = Tuple[int, ...]

ZERO_DEGREE = -1  # degree of the zero NPoly

_F0 = Fraction(0)
_F1 = Fraction(1)


def rational(x: RationalLike) -> Fraction:
    """Parse ``3``, ``"3"``, ``"-2/7"`` or a Fraction into a Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def rational_str(q: Fraction) -> str:
    """Canonical text form ``"p/q"`` or ``"p"``."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------- NPoly


class NPoly:
    """Polynomial in N with rational coefficients, ascending powers.

    Immutable.  Trailing zeros are stripped, so ``NPoly(())`` is the zero
    polynomial and has degree :data:`ZERO_DEGREE`.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        c = [rational(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        self.c: Tuple[Fraction, ...] = tuple(c)

    @classmethod
    def _raw(cls, c: Tuple[Fraction, ...]) -> "NPoly":
        # c must already be stripped
        obj = cls.__new__(cls)
        obj.c = c
        return obj

    @classmethod
    def const(cls, q: RationalLike) -> "NPoly":
        q = rational(q)
        return cls._raw((q,) if q else ())

    @classmethod
    def N(cls, power: int = 1) -> "NPoly":
        return cls._raw((_F0,) * power + (_F1,))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def is_constant(self) -> bool:
        return len(self.c) <= 1

    def constant_term(self) -> Fraction:
        return self.c[0] if self.c else _F0

    def coeff(self, power: int) -> Fraction:
        return self.c[power] if 0 <= power < len(self.c) else _F0

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        if isinstance(other, NPoly):
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c == ((rational(other),) if other else ())
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.c)

    def __repr__(self) -> str:
        return f"NPoly({self})"

    def __str__(self) -> str:
        if not self.c:
            return "0"
        parts = []
        for i, q in enumerate(self.c):
            if not q:
                continue
            s = rational_str(q)
            if i == 0:
                parts.append(s)
            else:
                mon = "N" if i == 1 else f"N^{i}"
                parts.append(mon if q == 1 else f"-{mon}" if q == -1 else f"{s}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")

    @staticmethod
    def _coerce(x) -> "NPoly":
        if isinstance(x, NPoly):
            return x
        if isinstance(x, (int, Fraction)):
            return NPoly.const(x)
        raise TypeError(f"cannot combine NPoly with {type(x).__name__}")

    def __add__(self, other) -> "NPoly":
        try:
            o = self._coerce(other).c
        except TypeError:
            return NotImplemented
        a = self.c
        if len(a) < len(o):
            a, o = o, a
        c = list(a)
        for i, q in enumerate(o):
            c[i] += q
        while c and not c[-1]:
            c.pop()
        return NPoly._raw(tuple(c))

    __radd__ = __add__

    def __neg__(self) -> "NPoly":
        return NPoly._raw(tuple(-q for q in self.c))

    def __sub__(self, other) -> "NPoly":
        try:
            return self + (-self._coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other) -> "NPoly":
        return (-self) + other

    def __mul__(self, other) -> "NPoly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return NPoly._raw(())
            return NPoly._raw(tuple(q * other for q in self.c))
        if not isinstance(other, NPoly):
            return NotImplemented
        a, b = self.c, other.c
        if not a or not b:
            return NPoly._raw(())
        if len(b) == 1:
            s = b[0]
            return NPoly._raw(tuple(q * s for q in a))
        if len(a) == 1:
            s = a[0]
            return NPoly._raw(tuple(q * s for q in b))
        c = [_F0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    c[i + j] += x * y
        return NPoly._raw(tuple(c))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "NPoly":
        out = NPoly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __call__(self, n: RationalLike) -> Fraction:
        n = rational(n)
        acc = _F0
        for q in reversed(self.c):
            acc = acc * n + q
        return acc

    def to_json(self) -> list:
        return [rational_str(q) for q in self.c]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "NPoly":
        return cls(Fraction(s) for s in data)


NPOLY_ZERO = NPoly()
NPOLY_ONE = NPoly.const(1)
N = NPoly.N()


def interpolate(points: Sequence[Tuple[Fraction, Fraction]]) -> NPoly:
    """Lagrange interpolation through ``(n_i, value_i)`` pairs."""
    out = NPOLY_ZERO
    for i, (xi, yi) in enumerate(points):
        if not yi:
            continue
        basis = NPoly.const(yi)
        for j, (xj, _) in enumerate(points):
            if j != i:
                basis = basis * NPoly((-xj / (xi - xj), 1 / (xi - xj)))
        out = out + basis
    return out


# --------------------------------------------------------------------------- surds


@lru_cache(maxsize=None)
def squarefree_split(n: int) -> Tuple[int, int]:
    """Return ``(s, r)`` with ``n == s*s*r`` and r squarefree (n > 0)."""
    if n <= 0:
        raise ValueError("squarefree_split needs a positive integer")
    s, r, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            r *= p
        p += 1
    return s, r * n


class SurdPoly:
    """Finite sum  sum_r c_r * sqrt(r)  with r squarefree and c_r an NPoly."""

    __slots__ = ("parts",)

    def __init__(self, parts: Optional[Mapping[int, NPoly]] = None):
        self.parts: Dict[int, NPoly] = {r: c for r, c in (parts or {}).items() if c}

    @classmethod
    def sqrt(cls, q: RationalLike, scale: Union[NPoly, RationalLike] = 1) -> "SurdPoly":
        """``scale * sqrt(q)`` for a nonnegative rational q."""
        q = rational(q)
        if q < 0:
            raise ValueError("square root of a negative rational")
        scale = NPoly._coerce(scale if isinstance(scale, NPoly) else rational(scale))
        if not q:
            return cls()
        # sqrt(p/d) = sqrt(p*d)/d
        s, r = squarefree_split(q.numerator * q.denominator)
        return cls({r: scale * Fraction(s, q.denominator)})

    @classmethod
    def of(cls, x: Union["SurdPoly", NPoly, RationalLike]) -> "SurdPoly":
        if isinstance(x, SurdPoly):
            return x
        if isinstance(x, NPoly):
            return cls({1: x})
        return cls({1: NPoly.const(rational(x))})

    def is_zero(self) -> bool:
        return not self.parts

    def __bool__(self) -> bool:
        return bool(self.parts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SurdPoly):
            try:
                other = SurdPoly.of(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.parts == other.parts

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.parts.items(), key=lambda kv: kv[0])))

    def __repr__(self) -> str:
        if not self.parts:
            return "SurdPoly(0)"
        body = " + ".join(f"({c})*sqrt({r})" if r != 1 else f"({c})" for r, c in sorted(self.parts.items()))
        return f"SurdPoly({body})"

    def __add__(self, other) -> "SurdPoly":
        other = SurdPoly.of(other)
        out = dict(self.parts)
        for r, c in other.parts.items():
            out[r] = out[r] + c if r in out else c
        return SurdPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "SurdPoly":
        return SurdPoly({r: -c for r, c in self.parts.items()})

    def __sub__(self, other) -> "SurdPoly":
        return self + (-SurdPoly.of(other))

    def __mul__(self, other) -> "SurdPoly":
        other = SurdPoly.of(other)
        out: Dict[int, NPoly] = {}
        for r1, c1 in self.parts.items():
            for r2, c2 in other.parts.items():
                g = math.gcd(r1, r2)
                r = (r1 // g) * (r2 // g)
                c = c1 * c2 * g
                out[r] = out[r] + c if r in out else c
        return SurdPoly(out)

    __rmul__ = __mul__

    def is_rational(self) -> bool:
        return set(self.parts) <= {1}

    def rational(self) -> NPoly:
        """The NPoly value; raises ``ValueError`` if an irrational part survives."""
        if not self.is_rational():
            raise ValueError(f"irrational coefficient {self!r}")
        return self.parts.get(1, NPOLY_ZERO)


# --------------------------------------------------------------------------- monomials


def monomial(exponents: Optional[Mapping[int, int]] = None) -> TMonomial:
    """Build a monomial from ``{k: e_k}``; ``monomial({1: 2, 2: 1})`` is t_1^2 t_2."""
    out = []
    for k, e in sorted((exponents or {}).items()):
        if k < 1:
            raise ValueError(f"time index must be >= 1, got {k}")
        if e < 0:
            raise ValueError("negative exponent")
        out.extend([k] * e)
    return tuple(out)


def weight(m: TMonomial) -> int:
    """Weight sum_k k*e_k of a monomial."""
    return sum(m)


def exponents(m: TMonomial) -> Dict[int, int]:
    return dict(sorted(Counter(m).items()))


def mono_mul(a: TMonomial, b: TMonomial) -> TMonomial:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


@lru_cache(maxsize=1 << 18)
def sub_multisets(m: TMonomial, max_size: int) -> Tuple[Tuple[TMonomial, TMonomial, int], ...]:
    """All ``(d, m/d, c)`` with d a sub-multiset of m of size <= max_size.

    ``c`` is the coefficient produced by applying the derivative monomial d to
    m, i.e. the product of falling factorials e_k!/(e_k - d_k)!.
    """
    exps = list(Counter(m).items())
    out = []
    ranges = [range(min(e, max_size) + 1) for _, e in exps]
    for choice in product(*ranges):
        if sum(choice) > max_size:
            continue
        d: list = []
        rest: list = []
        c = 1
        for (k, e), j in zip(exps, choice):
            d.extend([k] * j)
            rest.extend([k] * (e - j))
            for i in range(j):
                c *= e - i
        out.append((tuple(d), tuple(sorted(rest)), c))
    return tuple(out)


def canonical_key(m: TMonomial) -> Tuple[int, Tuple[int, ...]]:
    """Sort key: weight, then exponent vector on ascending variable index."""
    if not m:
        return (0, ())
    vec = [0] * m[-1]
    for k in m:
        vec[k - 1] += 1
    return (sum(m), tuple(vec))


@lru_cache(maxsize=None)
def partitions(n: int, max_part: Optional[int] = None) -> Tuple[TMonomial, ...]:
    """All monomials of weight exactly n (partitions of n), ascending parts."""
    if max_part is None:
        max_part = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            out.append(tuple(sorted(rest + (first,))))
    return tuple(sorted(out, key=canonical_key))


def monomials_up_to(w: int) -> Iterator[TMonomial]:
    """All monomials of weight <= w in canonical order."""
    for n in range(w + 1):
        yield from partitions(n)


def mono_str(m: TMonomial) -> str:
    if not m:
        return "1"
    return "*".join(f"t{k}" if e == 1 else f"t{k}^{e}" for k, e in exponents(m).items())


# --------------------------------------------------------------------------- TPolynomial


class TPolynomial:
    """Sparse polynomial in t_1, t_2, ... with NPoly coefficients.

    ``weight_bound`` of ``None`` means unbounded; otherwise no stored monomial
    exceeds it.  Arithmetic returns new objects; the bound of a result is the
    smaller of the operands' bounds.
    """

    __slots__ = ("terms", "weight_bound")

    def __init__(self, terms: Optional[Mapping[TMonomial, Union[NPoly, RationalLike]]] = None,
                 weight_bound: Optional[int] = None):
        clean: Dict[TMonomial, NPoly] = {}
        for m, c in (terms or {}).items():
            c = NPoly._coerce(c if isinstance(c, NPoly) else rational(c))
            m = tuple(sorted(m))
            if c and (weight_bound is None or sum(m) <= weight_bound):
                clean[m] = clean[m] + c if m in clean else c
        self.terms: Dict[TMonomial, NPoly] = {m: c for m, c in clean.items() if c}
        self.weight_bound = weight_bound

    @classmethod
    def _raw(cls, terms: Dict[TMonomial, NPoly], weight_bound: Optional[int] = None) -> "TPolynomial":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.weight_bound = weight_bound
        return obj

    @classmethod
    def one(cls) -> "TPolynomial":
        return cls._raw({(): NPOLY_ONE})

    @classmethod
    def var(cls, k: int, coeff: Union[NPoly, RationalLike] = 1) -> "TPolynomial":
        return cls({(k,): coeff})

    # -- queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, m: Union[TMonomial, Mapping[int, int]]) -> NPoly:
        if isinstance(m, Mapping):
            m = monomial(m)
        return self.terms.get(tuple(sorted(m)), NPOLY_ZERO)

    def max_weight(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self, w: int) -> bool:
        return all(sum(m) == w for m in self.terms)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: canonical_key(kv[0]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"TPolynomial({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{mono_str(m)}" for m, c in self.sorted_terms())

    # -- arithmetic
    def _bound(self, other: "TPolynomial") -> Optional[int]:
        bounds = [b for b in (self.weight_bound, other.weight_bound) if b is not None]
        return min(bounds) if bounds else None

    def __add__(self, other: "TPolynomial") -> "TPolynomial":
        if not isinstance(other, TPolynomial):
            return NotImplemented
        bound = self._bound(other)
        out = dict(self.terms)
        add_into(out, other.terms)
        if bound is not None:
            out = {m: c for m, c in out.items() if sum(m) <= bound}
        return TPolynomial._raw(out, bound)

    def __neg__(self) -> "TPolynomial":
        return TPolynomial._raw({m: -c for m, c in self.terms.items()}, self.weight_bound)

    def __sub__(self, other: "TPolynomial") -> "TPolynomial":
        return self + (-other)

    def scale(self, s: Union[NPoly, RationalLike]) -> "TPolynomial":
        s = NPoly._coerce(s if isinstance(s, NPoly) else rational(s))
        if not s:
            return TPolynomial._raw({}, self.weight_bound)
        out = {}
        for m, c in self.terms.items():
            v = c * s
            if v:
                out[m] = v
        return TPolynomial._raw(out, self.weight_bound)

    def __mul__(self, other) -> "TPolynomial":
        if isinstance(other, TPolynomial):
            return mul_truncated(self, other, self._bound(other))
        if isinstance(other, (NPoly, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def truncate(self, w: Optional[int]) -> "TPolynomial":
        if w is None:
            return TPolynomial._raw(dict(self.terms), self.weight_bound)
        bound = w if self.weight_bound is None else min(w, self.weight_bound)
        return TPolynomial._raw({m: c for m, c in self.terms.items() if sum(m) <= w}, bound)

    def layer(self, w: int) -> "TPolynomial":
        """Weight-w homogeneous part."""
        return TPolynomial._raw({m: c for m, c in self.terms.items() if sum(m) == w})

    def eval_N(self, n: RationalLike) -> "TPolynomial":
        return eval_N(self, n)

    def map_coefficients(self, fn) -> "TPolynomial":
        out = {}
        for m, c in self.terms.items():
            v = fn(c)
            if v:
                out[m] = v
        return TPolynomial._raw(out, self.weight_bound)

    def variables(self) -> set:
        return {k for m in self.terms for k in m}

    # -- canonical serialization
    def to_json(self) -> list:
        return [{"exponents": {str(k): e for k, e in exponents(m).items()}, "coeff": c.to_json()}
                for m, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data: Sequence[Mapping]) -> "TPolynomial":
        terms: Dict[TMonomial, NPoly] = {}
        for row in data:
            m = monomial({int(k): int(e) for k, e in row["exponents"].items()})
            c = NPoly.from_json(row["coeff"])
            if m in terms:
                raise ValueError(f"duplicate monomial {mono_str(m)}")
            if c:
                terms[m] = c
        return cls._raw(terms)


def add_into(acc: Dict[TMonomial, NPoly], terms: Mapping[TMonomial, NPoly]) -> None:
    """In-place ``acc += terms``, dropping cancelled entries."""
    for m, c in terms.items():
        if m in acc:
            v = acc[m] + c
            if v:
                acc[m] = v
            else:
                del acc[m]
        else:
            acc[m] = c


def mul_truncated(a: TPolynomial, b: TPolynomial, W: Optional[int]) -> TPolynomial:
    """Product of a and b with every monomial of weight > W dropped."""
    out: Dict[TMonomial, NPoly] = {}
    items_b = [(m, sum(m), c) for m, c in b.terms.items()]
    for ma, ca in a.terms.items():
        wa = sum(ma)
        if W is not None and wa > W:
            continue
        for mb, wb, cb in items_b:
            if W is not None and wa + wb > W:
                continue
            m = mono_mul(ma, mb)
            v = ca * cb
            if m in out:
                v = out[m] + v
                if v:
                    out[m] = v
                else:
                    del out[m]
            elif v:
                out[m] = v
    return TPolynomial._raw(out, W)


def eval_N(p: TPolynomial, n: RationalLike) -> TPolynomial:
    """Specialize every coefficient at N = n (result has constant NPolys)."""
    n = rational(n)
    return p.map_coefficients(lambda c: NPoly.const(c(n)))
