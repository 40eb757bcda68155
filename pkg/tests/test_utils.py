"""Tests for JSON report serialization"""

import numpy as np
import pytest

from utils.errors import ArtifactIOError, DataValidationError
from utils.reports import dumps, read_json, read_jsonl, write_json, write_jsonl

AWKWARD_FLOATS = [0.1, 1 / 3, 2 / 3, 1e300, 5e-324, 0.30000000000000004, 123456.789e-20]


def test_floats_read_back_bit_identical(tmp_path):
    path = write_json(tmp_path / "r.json", {"values": AWKWARD_FLOATS})
    assert read_json(path)["values"] == AWKWARD_FLOATS


def test_floats_use_shortest_round_trip_form():
    assert b"0.1" in dumps({"x": 0.1})
    assert b"0.10000000000000001" not in dumps({"x": 0.1})


def test_keys_sorted_and_reruns_byte_identical(tmp_path):
    payload = {"b": 1, "a": {"z": 2.5, "y": np.float64(1 / 7)}}
    first = write_json(tmp_path / "a.json", payload).read_bytes()
    second = write_json(tmp_path / "b.json", dict(reversed(list(payload.items())))).read_bytes()
    assert first == second
    assert first.index(b'"a"') < first.index(b'"b"')


def test_jsonl_round_trip(tmp_path):
    records = [{"step": 1, "loss": 0.25}, {"step": 2, "loss": 1 / 3}]
    assert read_jsonl(write_jsonl(tmp_path / "log.jsonl", records)) == records


def test_read_errors(tmp_path):
    with pytest.raises(ArtifactIOError):
        read_json(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{nope", encoding="utf-8")
    with pytest.raises(DataValidationError):
        read_json(bad)
