"""Canonical JSON persistence for tau and free-energy series.

File layout::

    {"header": {"version", "gmax", "convention", "kind", "eval_n"},
     "layers": [[row, ...], ...],
     "checksum": sha256 of the canonical dump of "layers"}

Rows are ``{"exponents": {"k": e}, "coeff": ["c0", "c1", ...]}`` with
rationals as strings; rows and exponent keys are in canonical order, so
write -> read -> write reproduces the same bytes.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional, Tuple, Union

from . import __version__
from .algebra import TPolynomial, rational, rational_str
from .tau import TauSeries

CONVENTION = "dt0=0"


class SeriesFileError(Exception):
    pass


def _canonical(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True)


def checksum(layers_json: list) -> str:
    return hashlib.sha256(_canonical(layers_json).encode()).hexdigest()


def series_to_json(series: TauSeries, eval_n=None) -> dict:
    layers = [series.layer(g).to_json() for g in range(series.g_max + 1)]
    return {
        "header": {
            "version": __version__,
            "gmax": series.g_max,
            "convention": CONVENTION,
            "kind": series.kind,
            "eval_n": None if eval_n is None else rational_str(rational(eval_n)),
        },
        "layers": layers,
        "checksum": checksum(layers),
    }


def dumps(series: TauSeries, eval_n=None) -> str:
    return json.dumps(series_to_json(series, eval_n), indent=1, ensure_ascii=True) + "\n"


def loads(text: str) -> Tuple[TauSeries, dict]:
    """Parse and validate; returns ``(series, header)``."""
    try:
        data = json.loads(text)
        header, layers, digest = data["header"], data["layers"], data["checksum"]
    except (ValueError, KeyError, TypeError) as exc:
        raise SeriesFileError(f"malformed series file: {exc}") from exc
    if header.get("convention") != CONVENTION:
        raise SeriesFileError(f"file uses boundary convention {header.get('convention')!r}, expected {CONVENTION!r}")
    if checksum(layers) != digest:
        raise SeriesFileError("checksum mismatch (file corrupt or edited)")
    if header.get("gmax") != len(layers) - 1:
        raise SeriesFileError("header gmax disagrees with the number of layers")
    try:
        series = TauSeries({g: TPolynomial.from_json(rows) for g, rows in enumerate(layers)},
                           header.get("kind", "tau"))
    except (ValueError, KeyError, TypeError) as exc:
        raise SeriesFileError(f"invalid layer data: {exc}") from exc
    return series, header


def write_series(path: Union[str, Path], series: TauSeries, eval_n=None) -> None:
    Path(path).write_text(dumps(series, eval_n))


def read_series(path: Union[str, Path]) -> Tuple[TauSeries, dict]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SeriesFileError(f"cannot read {path}: {exc}") from exc
    return loads(text)
