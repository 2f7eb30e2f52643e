"""Command-line interface: compute, verify, correlators, selfcheck.

Exit codes: 0 pass, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .algebra import TPolynomial, mono_str, rational
from .checks import (
    check_constraint_algebra,
    check_kw_reduction,
    check_shift,
    check_w3,
    check_winf,
    w3_normalization,
)
from .correlators import correlator_table, free_energy, table_json, table_text
from .io import SeriesFileError, read_series, write_series
from .operators import OperatorName, build, check_miura_match
from .tau import (
    CheckResult,
    TauSeries,
    VerificationReport,
    compute_tau_cutjoin,
    compute_tau_linear,
    degree_check,
    residual,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITES = ("annihilation", "commutators", "miura", "oracle", "degree", "all")

# lowest index at which each family is a constraint
CONSTRAINT_FAMILIES = (("Lsf", -1), ("Msf", -2), ("CalL_N", -1), ("CalM_N", -2))


class UsageError(Exception):
    pass


def parse_range(text: str) -> Tuple[int, int]:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}")
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def parse_rational(text: str) -> Fraction:
    try:
        return rational(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kptau", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="compute tau by the cut-and-join recursion and write it")
    c.add_argument("--gmax", type=int, help="highest hbar order (default: W // 3)")
    c.add_argument("--W", type=int, help="weight bound (default: 3 * gmax)")
    c.add_argument("--resume", type=Path, help="existing tau file whose layers are kept")
    c.add_argument("--out", type=Path, required=True)
    c.add_argument("--eval-n", type=parse_rational, help="write coefficients evaluated at N = p/q")

    v = sub.add_parser("verify", help="check a tau file and the operator identities")
    v.add_argument("file", nargs="?", type=Path, help="tau file (not needed for commutators/miura)")
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--range", type=parse_range, help="operator index range a..b")
    v.add_argument("--W", type=int, help="weight bound for the checks")
    v.add_argument("--out", type=Path, help="write the report here")
    v.add_argument("--eval-n", type=parse_rational, help="check the series specialized at N = p/q")

    r = sub.add_parser("correlators", help="table of open intersection numbers from a tau file")
    r.add_argument("file", type=Path)
    r.add_argument("--out", type=Path, help="JSON table (text table goes to stdout)")

    s = sub.add_parser("selfcheck", help="quick end-to-end consistency run (no files)")
    s.add_argument("--gmax", type=int, default=3)
    return p


def _fix_negative_range(argv: Sequence[str]) -> List[str]:
    """Let ``--range -3..3`` through argparse, which would take -3..3 for an option."""
    out: List[str] = []
    it = iter(argv)
    for a in it:
        if a == "--range":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--range={nxt}")
        else:
            out.append(a)
    return out


# --------------------------------------------------------------------------- compute


def cmd_compute(args) -> int:
    if args.gmax is None and args.W is None:
        raise UsageError("give --gmax or --W")
    gmax = args.gmax if args.gmax is not None else args.W // 3
    if gmax < 0:
        raise UsageError("--gmax must be >= 0")
    start = None
    if args.resume is not None:
        start, header = read_series(args.resume)
        if header.get("eval_n") is not None:
            raise UsageError("cannot resume from a file evaluated at a fixed N")
        if start.kind != "tau":
            raise UsageError("resume file is not a tau series")
    tau = compute_tau_cutjoin(gmax, start)
    if args.eval_n is not None:
        tau = tau.eval_N(args.eval_n)
    try:
        write_series(args.out, tau, args.eval_n)
    except OSError as exc:
        raise SeriesFileError(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote layers 0..{tau.g_max} to {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------- verify


def _from_result(label: str, res) -> CheckResult:
    if res.passed:
        return CheckResult(label, res.W, TPolynomial())
    m, diff = res.failure
    return CheckResult(label, res.W, TPolynomial(), note=f"{label} on {mono_str(m)}: difference {diff}")


def default_verify_W(tau: TauSeries, names: Sequence[OperatorName]) -> int:
    """Largest output weight at which every listed residual is complete for this tau."""
    best = None
    for name in names:
        k = abs(name.index or 0)
        low = min(build(name, 2 * k + 12).t_shifts(), default=0)
        w = 3 * (tau.g_max + 1) - 1 + low
        best = w if best is None else min(best, w)
    return best if best is not None else 3 * tau.g_max


def suite_annihilation(tau: TauSeries, header: dict, rng, W: Optional[int]) -> VerificationReport:
    lo, hi = rng or (-2, 3)
    names = [OperatorName(f, k) for f, first in CONSTRAINT_FAMILIES for k in range(max(lo, first), hi + 1)]
    W = default_verify_W(tau, names) if W is None else W
    if W < 0:
        raise UsageError("tau file too short for the requested operator range")
    n = header.get("eval_n")
    report = VerificationReport()
    for name in names:
        try:
            res = residual(name, tau, W)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if n is not None:
            res = res.eval_N(Fraction(n))
        report.checks.append(CheckResult(str(name), W, res))
    return report


def suite_degree(tau: TauSeries) -> VerificationReport:
    return degree_check(tau)


def suite_oracle(tau: TauSeries, header: dict) -> VerificationReport:
    lin = compute_tau_linear(tau.g_max).tau
    cj = compute_tau_cutjoin(tau.g_max)
    n = header.get("eval_n")
    report = VerificationReport()
    for g in range(tau.g_max + 1):
        ref = lin.layer(g) if n is None else lin.layer(g).eval_N(Fraction(n))
        report.checks.append(CheckResult(f"file layer {g} vs constraint solution", 3 * g, tau.layer(g) - ref))
        report.checks.append(CheckResult(f"cut-and-join vs constraint solution, layer {g}", 3 * g,
                                         cj.layer(g) - lin.layer(g)))
    return report


def suite_miura(rng, W: Optional[int]) -> VerificationReport:
    lo, hi = rng or (-3, 3)
    W = 9 if W is None else W
    rep = check_miura_match(W, range(lo, hi + 1))
    report = VerificationReport()
    bad = {(fam, k): m for fam, k, m in rep.mismatches}
    for k in range(lo, hi + 1):
        for fam in ("CalL_N", "CalM_N"):
            m = bad.get((fam, k))
            note = "" if m is None else f"Miura {fam}[{k}] differs on {mono_str(m)}"
            report.checks.append(CheckResult(f"Miura form of {fam}[{k}]", W, TPolynomial(), note))
    return report


def suite_commutators(rng, W: Optional[int]) -> VerificationReport:
    lo, hi = rng or (-3, 3)
    W = 9 if W is None else W
    ks = range(lo, hi + 1)
    report = VerificationReport()
    for res in check_winf(ks, W):
        report.checks.append(_from_result(res.label, res))
    pairs = [(k, m) for k in ks for m in ks]
    for res in check_w3(pairs, W, which=("LL", "LM")):
        report.checks.append(_from_result(res.label, res))
    norm = w3_normalization()
    for res in check_w3([(1, -1), (2, -2), (3, -2)], W, which=("MM",), m_norm=norm):
        report.checks.append(_from_result(f"{res.label} (M rescaled by sqrt({norm}))", res))
    lpairs = [(k, l) for k in ks if k >= -1 for l in ks if l >= -2 and k + l >= -2]
    for res in check_constraint_algebra(lpairs, W):
        report.checks.append(_from_result(res.label, res))
    return report


def cmd_verify(args) -> int:
    suites = ["degree", "annihilation", "oracle", "miura", "commutators"] if args.suite == "all" else [args.suite]
    needs_file = any(s in ("degree", "annihilation", "oracle") for s in suites)
    tau = header = None
    if needs_file:
        if args.file is None:
            raise UsageError(f"suite {args.suite} needs a tau file")
        tau, header = read_series(args.file)
        if tau.kind != "tau":
            raise UsageError("verify expects a tau series file")
        if args.eval_n is not None:
            stamped = header.get("eval_n")
            if stamped is None:
                tau = tau.eval_N(args.eval_n)
                header = dict(header, eval_n=str(args.eval_n))
            elif Fraction(stamped) != args.eval_n:
                raise UsageError(f"file is evaluated at N = {stamped}, not {args.eval_n}")
    report = VerificationReport()
    for s in suites:
        if s == "degree":
            part = suite_degree(tau)
        elif s == "annihilation":
            part = suite_annihilation(tau, header, args.range, args.W)
        elif s == "oracle":
            part = suite_oracle(tau, header)
        elif s == "miura":
            part = suite_miura(args.range, args.W)
        else:
            part = suite_commutators(args.range, args.W)
        print(f"[{s}] {sum(c.passed for c in part.checks)}/{len(part.checks)} checks passed")
        report.extend(part)
    text = report.summary() + "\n"
    first = report.first_failure()
    text += "RESULT: PASS\n" if first is None else f"RESULT: FAIL\nfirst failure: {first}\n"
    if args.out is not None:
        try:
            args.out.write_text(text)
        except OSError as exc:
            raise SeriesFileError(f"cannot write {args.out}: {exc}") from exc
    print("PASS" if first is None else f"FAIL: {first}")
    return EXIT_OK if first is None else EXIT_FAIL


# --------------------------------------------------------------------------- correlators


def cmd_correlators(args) -> int:
    series, header = read_series(args.file)
    if header.get("eval_n") is not None:
        raise UsageError("correlators need the N-dependence; file was evaluated at a fixed N")
    F = free_energy(series) if series.kind == "tau" else series
    rows = correlator_table(F)
    sys.stdout.write(table_text(rows))
    if args.out is not None:
        try:
            args.out.write_text(json.dumps(table_json(rows), indent=1) + "\n")
        except OSError as exc:
            raise SeriesFileError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


# --------------------------------------------------------------------------- selfcheck


def cmd_selfcheck(args) -> int:
    g = max(args.gmax, 1)
    tau = compute_tau_cutjoin(g)
    report = VerificationReport()
    report.extend(suite_oracle(tau, {}))
    report.extend(suite_degree(tau))
    report.extend(suite_annihilation(tau, {}, (-2, 1), None))
    report.extend(suite_miura((-2, 2), 6))
    for res in check_kw_reduction(range(-1, 3), 6):
        report.checks.append(_from_result(res.label, res))
    for n, s in (("W1", 3), ("W2", 6), ("D", 0)):
        res = check_shift(OperatorName(n), s, 6)
        report.checks.append(_from_result(res.label, res))
    print(report.summary())
    first = report.first_failure()
    print("PASS" if first is None else f"FAIL: {first}")
    return EXIT_OK if first is None else EXIT_FAIL


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "correlators": cmd_correlators,
            "selfcheck": cmd_selfcheck}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_fix_negative_range(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SeriesFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
