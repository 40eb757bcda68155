"""
Report Serialization

Deterministic JSON and JSON-lines writers built on orjson. Keys are sorted
and floats use the shortest round-trip representation, so reruns on the same
inputs produce byte-identical files.
"""

from pathlib import Path
from typing import Any, Iterable, List, Union

import numpy as np
import orjson

from utils.errors import ArtifactIOError, DataValidationError

PathLike = Union[str, Path]

_JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY
_JSONL_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def _default(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if isinstance(value, tuple):
        return list(value)
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    raise TypeError(f"Type is not JSON serializable: {type(value).__name__}")


def dumps(payload: Any) -> bytes:
    """Serialize a payload to deterministic, indented JSON bytes."""
    return orjson.dumps(payload, default=_default, option=_JSON_OPTIONS) + b"\n"


def write_json(path: PathLike, payload: Any) -> Path:
    """
    Write a JSON report.

    Floats use orjson's shortest round-trip form, not a fixed
    17-significant-digit format; each double still has exactly one spelling
    and reads back bit-identical.

    Args:
        path: Destination file
        payload: JSON-compatible object (pydantic models are dumped)

    Returns:
        The written path

    Raises:
        ArtifactIOError: If the file cannot be written
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(dumps(payload))
    except OSError as e:
        raise ArtifactIOError(f"Cannot write {path}: {e}") from e
    return path


def read_json(path: PathLike) -> Any:
    """
    Read a JSON file.

    Raises:
        ArtifactIOError: If the file is missing or unreadable
        DataValidationError: If the content is not valid JSON
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ArtifactIOError(f"Cannot read {path}: {e}") from e
    try:
        return orjson.loads(raw)
    except orjson.JSONDecodeError as e:
        raise DataValidationError(f"{path}: invalid JSON ({e})") from e


def jsonl_line(record: Any) -> bytes:
    """Serialize one JSON-lines record (no trailing newline)."""
    return orjson.dumps(record, default=_default, option=_JSONL_OPTIONS)


def write_jsonl(path: PathLike, records: Iterable[Any]) -> Path:
    """
    Write records as JSON-lines.

    Raises:
        ArtifactIOError: If the file cannot be written
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as f:
            for record in records:
                f.write(jsonl_line(record) + b"\n")
    except OSError as e:
        raise ArtifactIOError(f"Cannot write {path}: {e}") from e
    return path


def read_jsonl(path: PathLike) -> List[Any]:
    """Read a JSON-lines file into a list of records."""
    path = Path(path)
    try:
        lines = path.read_bytes().splitlines()
    except OSError as e:
        raise ArtifactIOError(f"Cannot read {path}: {e}") from e
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            records.append(orjson.loads(line))
        except orjson.JSONDecodeError as e:
            raise DataValidationError(f"{path}:{lineno}: invalid JSON ({e})") from e
    return records
