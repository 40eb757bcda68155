"""
Checkpoints and Word Vectors

Checkpoint directory layout: manifest.json (ordered [{name, shape}]),
weights.bin (little-endian float64, row-major, manifest order),
config.json (EncoderConfig) and vocab.txt.
"""

import hashlib
import logging
from pathlib import Path
from typing import Union

import numpy as np

from config.constants import (
    CHECKPOINT_CONFIG,
    CHECKPOINT_MANIFEST,
    CHECKPOINT_VOCAB,
    CHECKPOINT_WEIGHTS,
)
from encoder.model import EncoderModel, init_model
from encoder.tokenizer import SubwordVocabulary
from schemas import EncoderConfig
from utils.errors import ArtifactIOError, DataValidationError
from utils.reports import read_json, write_json

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_WEIGHT_DTYPE = np.dtype("<f8")


def save_checkpoint(model: EncoderModel, path: PathLike) -> Path:
    """
    Write a model checkpoint directory.

    Returns:
        The checkpoint directory

    Raises:
        ArtifactIOError: If any file cannot be written
    """
    path = Path(path)
    manifest = [{"name": name, "shape": list(t.shape)} for name, t in model.params.items()]
    blob = b"".join(t.data.astype(_WEIGHT_DTYPE).tobytes(order="C") for t in model.params.values())
    try:
        path.mkdir(parents=True, exist_ok=True)
        (path / CHECKPOINT_WEIGHTS).write_bytes(blob)
    except OSError as e:
        raise ArtifactIOError(f"Cannot write checkpoint {path}: {e}") from e
    write_json(path / CHECKPOINT_MANIFEST, manifest)
    write_json(path / CHECKPOINT_CONFIG, model.config.model_dump(mode="json"))
    model.vocab.to_file(path / CHECKPOINT_VOCAB)
    return path


def load_checkpoint(path: PathLike) -> EncoderModel:
    """
    Load a checkpoint written by save_checkpoint (bit-exact).

    Raises:
        ArtifactIOError: If files are missing
        DataValidationError: On an unknown manifest tensor, a shape mismatch or a size mismatch
    """
    path = Path(path)
    if not path.is_dir():
        raise ArtifactIOError(f"Checkpoint directory not found: {path}")
    config = EncoderConfig(**read_json(path / CHECKPOINT_CONFIG))
    vocab = SubwordVocabulary.from_file(path / CHECKPOINT_VOCAB)
    manifest = read_json(path / CHECKPOINT_MANIFEST)
    try:
        blob = (path / CHECKPOINT_WEIGHTS).read_bytes()
    except OSError as e:
        raise ArtifactIOError(f"Cannot read {path / CHECKPOINT_WEIGHTS}: {e}") from e

    model = init_model(config, vocab, seed=0)
    expected = sum(int(np.prod(entry["shape"])) for entry in manifest) * _WEIGHT_DTYPE.itemsize
    if len(blob) != expected:
        raise DataValidationError(
            f"{path}: weights.bin has {len(blob)} bytes, manifest describes {expected}"
        )

    state = {}
    offset = 0
    for entry in manifest:
        name, shape = entry["name"], tuple(entry["shape"])
        if name not in model.params:
            raise DataValidationError(f"{path}: unknown tensor '{name}' in manifest")
        count = int(np.prod(shape))
        values = np.frombuffer(blob, dtype=_WEIGHT_DTYPE, count=count, offset=offset)
        state[name] = values.astype(np.float64).reshape(shape)
        offset += count * _WEIGHT_DTYPE.itemsize
    model.load_state_dict(state)
    return model


def checkpoint_id(path: PathLike) -> str:
    """Short content hash of a checkpoint's weights."""
    path = Path(path)
    try:
        digest = hashlib.sha256((path / CHECKPOINT_WEIGHTS).read_bytes()).hexdigest()
    except OSError as e:
        raise ArtifactIOError(f"Cannot read {path / CHECKPOINT_WEIGHTS}: {e}") from e
    return digest[:16]


def load_word_vectors(path: PathLike, model: EncoderModel) -> EncoderModel:
    """
    Overwrite embedding rows of tokens found in a text word-vector file.

    Format: first line "<count> <dim>", then "token v1 ... vd" per line.

    Raises:
        ArtifactIOError: If the file cannot be read
        DataValidationError: If the file dimension differs from the model dimension
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ArtifactIOError(f"Cannot read word vectors {path}: {e}") from e
    if not lines:
        raise DataValidationError(f"{path}: empty word-vector file")

    header = lines[0].split()
    if len(header) != 2:
        raise DataValidationError(f"{path}: header must be '<count> <dim>'")
    dim = int(header[1])
    if dim != model.config.dim:
        raise DataValidationError(
            f"{path}: vector dimension {dim} does not match model dimension {model.config.dim}"
        )

    table = model.params["embeddings"].data
    overwritten = 0
    for lineno, line in enumerate(lines[1:], start=2):
        cols = line.rstrip().split(" ")
        if len(cols) != dim + 1:
            raise DataValidationError(f"{path}:{lineno}: expected {dim + 1} fields, got {len(cols)}")
        token_id = model.vocab.token_to_id.get(cols[0])
        if token_id is None:
            continue
        table[token_id] = np.asarray(cols[1:], dtype=np.float64)
        overwritten += 1

    logger.info("Loaded %d of %d vectors from %s", overwritten, len(lines) - 1, path)
    return model


def write_word_vectors(path: PathLike, vectors: dict) -> Path:
    """
    Write token -> vector pairs in the text word-vector format.

    Values use repr(), so reading the file back is exact.
    """
    path = Path(path)
    if not vectors:
        raise DataValidationError("No vectors to write")
    dims = {len(v) for v in vectors.values()}
    if len(dims) != 1:
        raise DataValidationError(f"Vectors have mixed dimensions: {sorted(dims)}")
    lines = [f"{len(vectors)} {dims.pop()}"]
    for token, values in vectors.items():
        lines.append(token + " " + " ".join(repr(float(x)) for x in values))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise ArtifactIOError(f"Cannot write word vectors {path}: {e}") from e
    return path
