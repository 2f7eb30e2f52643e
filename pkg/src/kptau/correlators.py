"""Free energy, geometric times and open intersection numbers.

Correlators are read off F = log tau operationally: with
``t_{2k+1} = T_k / (2k+1)!!`` and ``t_{2k+2} = S_k / (2^(k+1) (k+1)!)``, the
coefficient of ``prod T_a prod S_b`` and of ``N^b`` in F, times the product of
the factorials of the multiplicities, is ``<tau_a... sigma_b...>_{h,b}``.
Interior insertions tau_a sit on odd times, boundary insertions sigma_b on
even times.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import NPoly, TMonomial, TPolynomial, add_into, mul_truncated
from .tau import TauSeries


def _layer_products(a: TauSeries, b: TauSeries, g: int) -> Dict[TMonomial, NPoly]:
    acc: Dict[TMonomial, NPoly] = {}
    for j in range(1, g):
        if j in a.layers and (g - j) in b.layers:
            add_into(acc, mul_truncated(a.layers[j], b.layers[g - j], None).scale(j).terms)
    return acc


def free_energy(tau: TauSeries) -> TauSeries:
    """``F = log tau`` layer by layer.

    From ``hbar dtau/dhbar = (hbar dF/dhbar) tau``:
    ``g F^(g) = g tau^(g) - sum_{0<j<g} j F^(j) tau^(g-j)``.
    """
    if tau.kind != "tau" or tau.layer(0) != TPolynomial.one():
        raise ValueError("free_energy needs a tau series with layer 0 equal to 1")
    F = TauSeries({0: TPolynomial()}, "free-energy")
    for g in range(1, tau.g_max + 1):
        acc = dict(tau.layers[g].terms)
        corr = TPolynomial._raw(_layer_products(F, tau, g)).scale(Fraction(-1, g))
        add_into(acc, corr.terms)
        F.set_layer(g, TPolynomial._raw(acc))
    return F


def exp_series(F: TauSeries) -> TauSeries:
    """Inverse of :func:`free_energy`: ``g tau^(g) = sum_{0<j<=g} j F^(j) tau^(g-j)``."""
    if F.kind != "free-energy":
        raise ValueError("exp_series needs a free-energy series")
    tau = TauSeries({0: TPolynomial.one()})
    for g in range(1, F.g_max + 1):
        acc = dict(F.layers[g].terms)
        add_into(acc, TPolynomial._raw(_layer_products(F, tau, g)).scale(Fraction(1, g)).terms)
        tau.set_layer(g, TPolynomial._raw(acc))
    return tau


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def time_factor(k: int) -> Fraction:
    """``t_k = factor * (T or S)``: ``1/(2j+1)!!`` for k = 2j+1, ``1/(2^(j+1) (j+1)!)`` for k = 2j+2."""
    if k < 1:
        raise ValueError("time index must be >= 1")
    if k % 2:
        return Fraction(1, double_factorial(k))
    j = k // 2 - 1
    return Fraction(1, 2 ** (j + 1) * factorial(j + 1))


def geometric_label(k: int) -> Tuple[str, int]:
    """``t_{2j+1} -> ("T", j)``, ``t_{2j+2} -> ("S", j)``."""
    return ("T", (k - 1) // 2) if k % 2 else ("S", k // 2 - 1)


def time_index(label: str, j: int) -> int:
    return 2 * j + 1 if label == "T" else 2 * j + 2


def monomial_factor(m: TMonomial) -> Fraction:
    f = Fraction(1)
    for k in m:
        f *= time_factor(k)
    return f


def to_geometric_times(F: TauSeries) -> TauSeries:
    """Rescale every monomial so that its variables read as T_j (odd k) and S_j (even k).

    The returned series keeps the t-indices as labels (use :func:`geometric_label`).
    """
    layers = {}
    for g, p in F.layers.items():
        out = {}
        for m, c in p.terms.items():
            out[m] = c * monomial_factor(m)
        layers[g] = TPolynomial._raw(out)
    return TauSeries(layers, F.kind)


@dataclass(frozen=True, order=True)
class CorrelatorKey:
    """``<tau_alphas sigma_betas>_{h,b}``."""

    alphas: Tuple[int, ...]
    betas: Tuple[int, ...]
    h: int
    b: int

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(sorted(self.alphas)))
        object.__setattr__(self, "betas", tuple(sorted(self.betas)))
        if min(self.alphas + self.betas, default=0) < 0 or self.h < 0 or self.b < 0:
            raise ValueError("descendant indices, genus and boundary count must be >= 0")

    @property
    def dimension(self) -> int:
        return 6 * self.h - 6 + 3 * self.b + len(self.betas) + 2 * len(self.alphas)

    @property
    def degree(self) -> int:
        return 2 * sum(self.alphas) + 2 * sum(self.betas)

    def dimension_ok(self) -> bool:
        return self.dimension == self.degree

    def parity_ok(self) -> bool:
        return self.dimension % 2 == 0

    def stable(self) -> bool:
        return 4 * self.h - 4 + 2 * self.b + len(self.betas) + 2 * len(self.alphas) > 0

    def monomial(self) -> TMonomial:
        return tuple(sorted([time_index("T", a) for a in self.alphas] + [time_index("S", b) for b in self.betas]))

    def symmetry_factor(self) -> int:
        f = 1
        for mult in Counter(self.alphas).values():
            f *= factorial(mult)
        for mult in Counter(self.betas).values():
            f *= factorial(mult)
        return f

    def __str__(self) -> str:
        ins = " ".join([f"tau_{a}" for a in self.alphas] + [f"sigma_{b}" for b in self.betas])
        return f"<{ins}>_{{{self.h},{self.b}}}"


@dataclass(frozen=True)
class CorrelatorValue:
    key: CorrelatorKey
    value: Fraction
    flag: Optional[str] = None  # "dimension" or "parity" when the key is excluded


def genus_of(m: TMonomial, b: int) -> int:
    """Genus from an F-monomial and its N-power via ``2h - 2 + b + k + l = weight / 3``.

    Raises ``ArithmeticError`` when the genus comes out non-integral or negative.
    """
    w = sum(m)
    if w % 3:
        raise ArithmeticError(f"weight {w} of {m} is not a multiple of 3")
    kl = len(m)
    twice = w // 3 + 2 - b - kl
    if twice % 2 or twice < 0:
        raise ArithmeticError(f"non-integral or negative genus for monomial {m} at N^{b}")
    return twice // 2


def key_of(m: TMonomial, b: int) -> CorrelatorKey:
    alphas = tuple(geometric_label(k)[1] for k in m if k % 2)
    betas = tuple(geometric_label(k)[1] for k in m if not k % 2)
    return CorrelatorKey(alphas, betas, genus_of(m, b), b)


def correlator(F: TauSeries, key: CorrelatorKey) -> CorrelatorValue:
    """Value of one correlator (zero, with a flag, for keys that violate the selection rules)."""
    if F.kind != "free-energy":
        raise ValueError("correlators are read from a free-energy series")
    if not key.parity_ok():
        return CorrelatorValue(key, Fraction(0), "parity")
    if not key.dimension_ok():
        return CorrelatorValue(key, Fraction(0), "dimension")
    m = key.monomial()
    if sum(m) % 3 or sum(m) // 3 > F.g_max:
        raise ValueError(f"{key} lies outside the computed range of F")
    c = F.coefficient(m)
    if c.coeff(key.b):
        genus_of(m, key.b)  # audit: must agree with the key
    return CorrelatorValue(key, c.coeff(key.b) * monomial_factor(m) * key.symmetry_factor())


def correlator_table(F: TauSeries) -> List[CorrelatorValue]:
    """Every nonzero correlator stored in F, in canonical key order.

    Each entry is audited: its genus must be integral and its key must satisfy
    the dimension constraint.
    """
    rows = []
    for g, p in sorted(F.layers.items()):
        for m, c in p.terms.items():
            for b, v in enumerate(c.c):
                if not v:
                    continue
                key = key_of(m, b)
                if not key.dimension_ok():
                    raise ArithmeticError(f"{key} has a nonzero coefficient but violates the dimension constraint")
                rows.append(CorrelatorValue(key, v * monomial_factor(m) * key.symmetry_factor()))
    rows.sort(key=lambda r: (r.key.h, r.key.b, len(r.key.alphas) + len(r.key.betas), r.key.alphas, r.key.betas))
    return rows


def kw_specialize(tau: TauSeries) -> TauSeries:
    """Set N = 0 and check that no even time survives."""
    out = tau.eval_N(0)
    for g, p in out.layers.items():
        for m in p.terms:
            if any(k % 2 == 0 for k in m):
                raise ArithmeticError(f"even-time monomial {m} survives at N = 0 in layer {g}")
    return out


def table_text(rows: Sequence[CorrelatorValue]) -> str:
    """Aligned text rendering of a correlator table."""
    cells = [("alphas", "betas", "h", "b", "value")]
    for r in rows:
        cells.append((",".join(map(str, r.key.alphas)) or "-", ",".join(map(str, r.key.betas)) or "-",
                      str(r.key.h), str(r.key.b), str(r.value)))
    widths = [max(len(c[i]) for c in cells) for i in range(5)]
    return "\n".join("  ".join(c[i].ljust(widths[i]) for i in range(5)).rstrip() for c in cells) + "\n"


def table_json(rows: Sequence[CorrelatorValue]) -> list:
    return [{"alphas": list(r.key.alphas), "betas": list(r.key.betas), "h": r.key.h, "b": r.key.b,
             "value": str(r.value)} for r in rows]
