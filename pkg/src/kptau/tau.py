"""The Kontsevich-Penner tau-function, layer by layer in hbar.

Two independent routes:

* :func:`compute_tau_cutjoin` runs ``tau^(g) = (W1 tau^(g-1) + W2 tau^(g-2)) / g``.
* :func:`compute_tau_linear` solves the Virasoro and W(3) constraints for the
  unknown coefficients of each layer, given the lower layers.

Layer g of tau is homogeneous of weight 3g (hbar has weight -3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import (
    NPOLY_ONE,
    NPOLY_ZERO,
    NPoly,
    TMonomial,
    TPolynomial,
    add_into,
    canonical_key,
    mono_str,
    partitions,
)
from .linsolve import SparseSystem, Underdetermined
from .operators import BasisAction, OperatorName, apply, build

KINDS = ("tau", "free-energy")


class TauSeries:
    """``{g: layer}`` with layer g homogeneous of weight 3g."""

    def __init__(self, layers: Optional[Dict[int, TPolynomial]] = None, kind: str = "tau"):
        if kind not in KINDS:
            raise ValueError(f"unknown series kind {kind!r}")
        self.kind = kind
        self.layers: Dict[int, TPolynomial] = {}
        for g, p in sorted((layers or {}).items()):
            self.set_layer(g, p)

    def set_layer(self, g: int, p: TPolynomial) -> None:
        if g < 0:
            raise ValueError("negative layer index")
        if not p.is_homogeneous(3 * g):
            raise ValueError(f"layer {g} is not homogeneous of weight {3 * g}")
        if g == 0:
            want = TPolynomial.one() if self.kind == "tau" else TPolynomial()
            if p != want:
                raise ValueError(f"layer 0 of a {self.kind} series must be {want}")
        self.layers[g] = TPolynomial._raw(dict(p.terms))

    @property
    def g_max(self) -> int:
        """Highest layer present with all lower layers present too (-1 if empty)."""
        g = -1
        while g + 1 in self.layers:
            g += 1
        return g

    def layer(self, g: int) -> TPolynomial:
        return self.layers.get(g, TPolynomial())

    def total(self, g_max: Optional[int] = None) -> TPolynomial:
        acc: Dict[TMonomial, NPoly] = {}
        for g, p in self.layers.items():
            if g_max is None or g <= g_max:
                add_into(acc, p.terms)
        return TPolynomial._raw(acc)

    def coefficient(self, m) -> NPoly:
        m = tuple(sorted(m))
        return self.layer(sum(m) // 3).coefficient(m) if sum(m) % 3 == 0 else NPOLY_ZERO

    def truncated(self, g_max: int) -> "TauSeries":
        return TauSeries({g: p for g, p in self.layers.items() if g <= g_max}, self.kind)

    def eval_N(self, n) -> "TauSeries":
        return TauSeries({g: p.eval_N(n) for g, p in self.layers.items()}, self.kind)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TauSeries):
            return NotImplemented
        return self.kind == other.kind and self.layers == other.layers

    def __repr__(self) -> str:
        return f"TauSeries(kind={self.kind!r}, g_max={self.g_max})"


# --------------------------------------------------------------------------- cut-and-join


def compute_tau_cutjoin(g_max: int, start: Optional[TauSeries] = None) -> TauSeries:
    """Layers 0..g_max from the cut-and-join recursion.

    With ``start`` the layers it already has are kept and only the missing
    ones are computed.
    """
    if g_max < 0:
        raise ValueError("g_max must be >= 0")
    tau = TauSeries({0: TPolynomial.one()}) if start is None else TauSeries(start.layers, "tau")
    if start is not None and start.kind != "tau":
        raise ValueError("can only resume a tau series")
    first = tau.g_max + 1
    if first == 0:
        tau.set_layer(0, TPolynomial.one())
        first = 1
    if first > g_max:
        return tau.truncated(g_max)
    w_in = 3 * (g_max - 1)
    W1 = build(OperatorName("W1"), max(w_in, 0))
    W2 = build(OperatorName("W2"), max(w_in - 3, 0))
    for g in range(first, g_max + 1):
        acc = apply(W1, tau.layer(g - 1))
        if g >= 2:
            acc = acc + apply(W2, tau.layer(g - 2))
        tau.set_layer(g, acc.scale(Fraction(1, g)))
    return tau


# --------------------------------------------------------------------------- constraint solver


DEFAULT_FAMILIES = (("Lsf", -1), ("Msf", -2))


@dataclass
class LayerManifest:
    """What it took to pin down one layer."""

    g: int
    unknowns: int
    equations: int
    rank: int
    method: str
    ranges: Dict[str, Tuple[int, int]]  # family -> (lowest, highest) index used to reach full rank
    available: Dict[str, Tuple[int, int]]  # family -> index range that was assembled

    def to_json(self) -> dict:
        return {
            "g": self.g, "unknowns": self.unknowns, "equations": self.equations, "rank": self.rank,
            "method": self.method,
            "ranges": {k: list(v) for k, v in self.ranges.items()},
            "available": {k: list(v) for k, v in self.available.items()},
        }


@dataclass
class LinearResult:
    tau: TauSeries
    manifest: List[LayerManifest] = field(default_factory=list)


def leading_order(family: str, k: int) -> int:
    """Highest hbar order present in the (untruncated) operator."""
    op = build(OperatorName(family, k), 2 * abs(k) + 12)
    return max(op.components(), default=0)


def _leading_part(family: str, k: int, g: int):
    """Leading-hbar part of the operator, truncated for a weight-3g input (None if it vanishes)."""
    h = leading_order(family, k)
    comps = build(OperatorName(family, k), 3 * g).components()
    return h, comps, comps.get(h)


def _family_range(family: str, lo: int, g: int) -> List[int]:
    """Indices from lo upward whose leading part acts on a weight-3g layer."""
    out = []
    k = lo
    while _leading_part(family, k, g)[2] is not None:
        out.append(k)
        k += 1
    return out


def constraint_rows(family: str, k: int, tau: TauSeries, g: int, columns: Sequence[TMonomial],
                    cache: Dict) -> List[Tuple[object, Dict[TMonomial, NPoly], NPoly]]:
    """Equations imposed on layer g by one operator, given layers < g of tau.

    The leading hbar component acts on the unknown layer; the other
    components act on the known lower layers and go to the right-hand side.
    """
    hmax, comps, _ = _leading_part(family, k, g)
    key = (family, k, 3 * g)
    if key not in cache:
        cache[key] = BasisAction(comps[hmax])
    act = cache[key]
    cols: Dict[TMonomial, Dict[TMonomial, NPoly]] = {}
    for m in columns:
        for out, c in act.on_monomial(m).terms.items():
            cols.setdefault(out, {})[m] = c
    rhs: Dict[TMonomial, NPoly] = {}
    for h, part in comps.items():
        if h == hmax:
            continue
        gl = g - hmax + h
        if gl < 0:
            continue
        add_into(rhs, apply(part, tau.layer(gl)).terms)
    rows = []
    for out in sorted(set(cols) | set(rhs), key=canonical_key):
        rows.append(((f"{family}[{k}]", mono_str(out)), cols.get(out, {}), -rhs.get(out, NPOLY_ZERO)))
    return rows


def solve_layer(tau: TauSeries, g: int, families=DEFAULT_FAMILIES) -> Tuple[TPolynomial, LayerManifest]:
    """Solve the constraints for layer g given layers 0..g-1 of tau.

    Every operator whose leading part can act on the layer contributes rows,
    so the system is overdetermined and consistency is checked; the manifest
    records the shortest prefix of each family that already gave full rank.
    Raises :class:`Inconsistent` or :class:`Underdetermined`.
    """
    columns = list(partitions(3 * g))
    ops = []
    available = {}
    for family, lo in families:
        ks = _family_range(family, lo, g)
        available[family] = (lo, ks[-1] if ks else lo - 1)
        ops += [(-_leading_part(family, k, g)[2].weight_shift, family, k) for k in ks]
    ops.sort()
    system = SparseSystem(columns)
    cache: Dict = {}
    used = {family: (lo, lo - 1) for family, lo in families}
    full = False
    for _, family, k in ops:
        for tag, row, rhs in constraint_rows(family, k, tau, g, columns, cache):
            system.add(row, rhs, tag)
        if not full:
            used[family] = (used[family][0], k)
            full = system.is_full_rank() and not system.deferred
    sol, method = system.solve()
    layer = TPolynomial._raw({m: c for m, c in sol.items() if c})
    if not full and method == "exact":  # pragma: no cover - solve() would have raised
        raise Underdetermined(system.free_columns())
    manifest = LayerManifest(g, len(columns), len(system.rows), len(columns) if method == "sampled"
                             else system.rank, method, used, available)
    return layer, manifest


def compute_tau_linear(g_max: int, families=DEFAULT_FAMILIES, start: Optional[TauSeries] = None) -> LinearResult:
    """Layers 0..g_max by solving the constraints order by order."""
    if g_max < 0:
        raise ValueError("g_max must be >= 0")
    tau = TauSeries({0: TPolynomial.one()}) if start is None else TauSeries(start.layers)
    result = LinearResult(tau)
    for g in range(tau.g_max + 1, g_max + 1):
        layer, man = solve_layer(tau, g, families)
        tau.set_layer(g, layer)
        result.manifest.append(man)
    return result


# --------------------------------------------------------------------------- verification


@dataclass
class CheckResult:
    name: str
    max_weight: int
    residual: TPolynomial
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.residual.is_zero() and not self.note

    def first_failure(self) -> Optional[str]:
        if self.note:
            return self.note
        if self.residual.is_zero():
            return None
        m, c = self.residual.sorted_terms()[0]
        return f"{self.name} at {mono_str(m)}: residual {c}"


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> Optional[str]:
        for c in self.checks:
            if not c.passed:
                return c.first_failure()
        return None

    def summary(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name} (weight <= {c.max_weight})" for c in self.checks]
        return "\n".join(lines)

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)


def required_weight(op_name: OperatorName, W: int) -> int:
    """Input weight needed so that ``op tau`` is complete up to output weight W."""
    k = abs(op_name.index or 0)
    op = build(op_name, max(W, 0) + 2 * k + 12)
    low = min(op.t_shifts(), default=0)
    return W - low


def residual(op_name: OperatorName, tau: TauSeries, W: int) -> TPolynomial:
    """``op tau`` truncated at output weight W (needs tau through weight ``required_weight``)."""
    need = required_weight(op_name, W)
    if 3 * (tau.g_max + 1) <= need:
        raise ValueError(f"{op_name} to weight {W} needs tau through weight {need}, have {3 * tau.g_max}")
    op = build(op_name, need)
    acc: Dict[TMonomial, NPoly] = {}
    for g, p in tau.layers.items():
        if 3 * g <= need:
            add_into(acc, apply(op, p, W).terms)
    return TPolynomial._raw(acc)


def verify_annihilation(tau: TauSeries, l_range: Iterable[int], m_range: Iterable[int], W: int,
                        families: Tuple[str, str] = ("Lsf", "Msf")) -> VerificationReport:
    """Residuals of the two constraint families on tau up to output weight W."""
    report = VerificationReport()
    for fam, ks in ((families[0], l_range), (families[1], m_range)):
        for k in ks:
            name = OperatorName(fam, k)
            try:
                res = residual(name, tau, W)
                report.checks.append(CheckResult(str(name), W, res))
            except ValueError as exc:
                report.checks.append(CheckResult(str(name), W, TPolynomial(), note=str(exc)))
    return report


def degree_check(tau: TauSeries) -> VerificationReport:
    """``D tau^(g) == g tau^(g)`` for every stored layer."""
    report = VerificationReport()
    for g, p in sorted(tau.layers.items()):
        D = build(OperatorName("D"), 3 * g)
        report.checks.append(CheckResult(f"D on layer {g}", 3 * g, apply(D, p) - p.scale(g)))
    return report


def oracle_check(tau: TauSeries, g_max: Optional[int] = None) -> VerificationReport:
    """Recompute with the constraint solver and compare layer by layer."""
    g_max = tau.g_max if g_max is None else g_max
    lin = compute_tau_linear(g_max).tau
    report = VerificationReport()
    for g in range(g_max + 1):
        report.checks.append(CheckResult(f"linear solve vs stored layer {g}", 3 * g,
                                          tau.layer(g) - lin.layer(g)))
    return report


def odd_only(p: TPolynomial) -> bool:
    return all(k % 2 for m in p.terms for k in m)


def perturbed(tau: TauSeries, g: int, m: TMonomial, delta=1) -> TauSeries:
    """Copy of tau with one coefficient of layer g shifted by delta (harness sanity)."""
    layers = dict(tau.layers)
    layers[g] = layer = layers[g] + TPolynomial({m: delta})
    if not layer.is_homogeneous(3 * g):
        raise ValueError("perturbation monomial has the wrong weight")
    return TauSeries(layers, tau.kind)
