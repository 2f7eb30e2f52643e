import json

import pytest

from kptau.io import CONVENTION, SeriesFileError, dumps, loads, read_series, write_series


def test_round_trip_is_byte_identical(tau6, tmp_path):
    path = tmp_path / "tau.json"
    write_series(path, tau6)
    series, header = read_series(path)
    assert series == tau6
    assert header["gmax"] == 6 and header["convention"] == CONVENTION
    assert dumps(series) == path.read_text()


def test_checksum_detects_edit(tau6):
    data = json.loads(dumps(tau6.truncated(2)))
    data["layers"][1][0]["coeff"] = ["7"]
    with pytest.raises(SeriesFileError, match="checksum"):
        loads(json.dumps(data))


def test_convention_mismatch_rejected(tau6):
    data = json.loads(dumps(tau6.truncated(1)))
    data["header"]["convention"] = "dt0=N"
    with pytest.raises(SeriesFileError, match="convention"):
        loads(json.dumps(data))


def test_malformed_and_missing(tmp_path):
    with pytest.raises(SeriesFileError):
        loads("{}")
    with pytest.raises(SeriesFileError):
        read_series(tmp_path / "absent.json")


def test_eval_n_header(tau6):
    _, header = loads(dumps(tau6.eval_N(2).truncated(1), eval_n=2))
    assert header["eval_n"] == "2"
