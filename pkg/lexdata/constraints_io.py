"""
Constraint Files

Lossless 9-column TSV serialization of mined constraints.
"""

from pathlib import Path
from typing import List, Sequence, Union

from config.constants import CONSTRAINT_COLUMNS
from lexdata.models import ConstraintPair
from utils.errors import ArtifactIOError, DataValidationError
from utils.validators import validate_tab_free

PathLike = Union[str, Path]

HEADER = "\t".join(CONSTRAINT_COLUMNS)


def _row(pair: ConstraintPair) -> str:
    values = [
        pair.w1, pair.l1, pair.w2, pair.l2,
        pair.g1 or "", pair.gl1 or "", pair.g2 or "", pair.gl2 or "",
        pair.synset_id,
    ]
    for name, value in zip(CONSTRAINT_COLUMNS, values):
        is_valid, error = validate_tab_free(value, name)
        if not is_valid:
            raise DataValidationError(f"{pair.synset_id}: {error}")
    return "\t".join(values)


def write_constraints(pairs: Sequence[ConstraintPair], path: PathLike) -> Path:
    """
    Write constraints as UTF-8 TSV with a header row.

    Raises:
        DataValidationError: If a word or gloss contains a tab or newline
        ArtifactIOError: If the file cannot be written
    """
    path = Path(path)
    lines = [HEADER] + [_row(pair) for pair in pairs]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as e:
        raise ArtifactIOError(f"Cannot write {path}: {e}") from e
    return path


def read_constraints(path: PathLike) -> List[ConstraintPair]:
    """
    Read a constraint TSV written by write_constraints.

    Raises:
        ArtifactIOError: If the file is missing
        DataValidationError: On a bad header or a column-count mismatch
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as f:
            lines = f.read().split("\n")
    except FileNotFoundError as e:
        raise ArtifactIOError(f"File not found: {path}") from e
    except OSError as e:
        raise ArtifactIOError(f"Cannot read {path}: {e}") from e

    if not lines or lines[0] != HEADER:
        raise DataValidationError(f"{path}: missing or unexpected header")

    pairs = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != len(CONSTRAINT_COLUMNS):
            raise DataValidationError(
                f"{path}:{lineno}: expected {len(CONSTRAINT_COLUMNS)} columns, got {len(cols)}"
            )
        w1, l1, w2, l2, g1, gl1, g2, gl2, synset_id = cols
        try:
            pairs.append(ConstraintPair(
                w1=w1, l1=l1, w2=w2, l2=l2, synset_id=synset_id,
                g1=g1 or None, gl1=gl1 or None,
                g2=g2 or None, gl2=gl2 or None,
            ))
        except DataValidationError as e:
            raise DataValidationError(f"{path}:{lineno}: {e}") from e
    return pairs
