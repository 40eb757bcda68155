"""
Evaluation Datasets

Dataset models and TSV loaders for the three evaluation tasks.
"""

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple, Union

from utils.errors import ArtifactIOError, DataValidationError

PathLike = Union[str, Path]

_PAIR_NAME = re.compile(r'^([a-z]{2,3})[-_]([a-z]{2,3})$')


def _read_rows(path: PathLike, columns: int) -> List[List[str]]:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except FileNotFoundError as e:
        raise ArtifactIOError(f"File not found: {path}") from e
    except OSError as e:
        raise ArtifactIOError(f"Cannot read {path}: {e}") from e
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != columns:
            raise DataValidationError(f"{path}:{lineno}: expected {columns} columns, got {len(cols)}")
        rows.append([c.strip() for c in cols])
    return rows


def language_pair_from_name(path: PathLike) -> Optional[Tuple[str, str]]:
    """Parse "<src>-<tgt>" from a file stem such as "en-fr.tsv"."""
    match = _PAIR_NAME.match(Path(path).stem.split(".")[0])
    return (match.group(1), match.group(2)) if match else None


# ============================================================================
# BLI
# ============================================================================

@dataclass
class BliDataset:
    """Source queries with their gold targets, plus the target retrieval vocabulary"""
    src: str
    tgt: str
    queries: List[Tuple[str, List[str]]]
    vocabulary: List[str]
    name: str = ""

    def __post_init__(self):
        self._vocab_index: Dict[str, int] = {}
        for i, word in enumerate(self.vocabulary):
            self._vocab_index.setdefault(word, i)
        for source, golds in self.queries:
            for gold in golds:
                if gold not in self._vocab_index:
                    raise DataValidationError(
                        f"{self.dataset_id}: gold target '{gold}' (for '{source}') "
                        "is not in the target vocabulary"
                    )
        sources = [s for s, _ in self.queries]
        if len(set(sources)) != len(sources):
            raise DataValidationError(f"{self.dataset_id}: repeated source word; group golds per source")

    @property
    def dataset_id(self) -> str:
        return self.name or f"{self.src}-{self.tgt}"

    def gold_indices(self) -> List[List[int]]:
        return [[self._vocab_index[g] for g in golds] for _, golds in self.queries]

    def exclusion_words(self) -> Set[Tuple[str, str]]:
        words = {(source, self.src) for source, _ in self.queries}
        words |= {(gold, self.tgt) for _, golds in self.queries for gold in golds}
        return words

    def __len__(self) -> int:
        return len(self.queries)


def group_translation_pairs(rows: List[Tuple[str, str]]) -> List[Tuple[str, List[str]]]:
    """Group (source, gold) rows by source, keeping first-appearance order."""
    grouped: Dict[str, List[str]] = {}
    for source, gold in rows:
        golds = grouped.setdefault(source, [])
        if gold not in golds:
            golds.append(gold)
    return list(grouped.items())


def load_vocabulary(path: PathLike) -> List[str]:
    """One word per line; repeated words keep their first position."""
    seen = set()
    words = []
    for (word,) in _read_rows(path, 1):
        if word and word not in seen:
            seen.add(word)
            words.append(word)
    return words


def load_bli_dataset(
    pairs_path: PathLike,
    vocab_path: PathLike,
    src: Optional[str] = None,
    tgt: Optional[str] = None,
) -> BliDataset:
    """
    Load a BLI test file ("source<TAB>target") and its target vocabulary.

    Languages default to the "<src>-<tgt>" prefix of the pairs file name.

    Raises:
        DataValidationError: On a malformed row, unknown languages, or a gold outside the vocabulary
    """
    if src is None or tgt is None:
        parsed = language_pair_from_name(pairs_path)
        if parsed is None:
            raise DataValidationError(
                f"Cannot infer the language pair of {pairs_path}; name it '<src>-<tgt>.tsv'"
            )
        src, tgt = parsed
    rows = [(s, t) for s, t in _read_rows(pairs_path, 2)]
    return BliDataset(
        src=src,
        tgt=tgt,
        queries=group_translation_pairs(rows),
        vocabulary=load_vocabulary(vocab_path),
        name=Path(pairs_path).stem,
    )


# ============================================================================
# XLSIM
# ============================================================================

@dataclass
class XlsimDataset:
    l1: str
    l2: str
    entries: List[Tuple[str, str, float]]
    name: str = ""

    def __post_init__(self):
        if len(self.entries) < 2:
            raise DataValidationError(f"{self.dataset_id}: at least 2 entries are needed")

    @property
    def dataset_id(self) -> str:
        return self.name or f"{self.l1}-{self.l2}"

    def exclusion_words(self) -> Set[Tuple[str, str]]:
        return {(w1, self.l1) for w1, _, _ in self.entries} | {(w2, self.l2) for _, w2, _ in self.entries}


def load_xlsim_dataset(path: PathLike, l1: Optional[str] = None, l2: Optional[str] = None) -> XlsimDataset:
    """
    Load "w1<TAB>w2<TAB>score" rows.

    Raises:
        DataValidationError: On malformed rows or non-finite scores
    """
    if l1 is None or l2 is None:
        parsed = language_pair_from_name(path)
        if parsed is None:
            raise DataValidationError(f"Cannot infer the language pair of {path}; name it '<l1>-<l2>.tsv'")
        l1, l2 = parsed
    entries = []
    for w1, w2, score in _read_rows(path, 3):
        try:
            value = float(score)
        except ValueError as e:
            raise DataValidationError(f"{path}: score '{score}' is not a number") from e
        if value != value or value in (float("inf"), float("-inf")):
            raise DataValidationError(f"{path}: non-finite score for ({w1}, {w2})")
        entries.append((w1, w2, value))
    return XlsimDataset(l1=l1, l2=l2, entries=entries, name=Path(path).stem)


# ============================================================================
# SENTENCE RETRIEVAL
# ============================================================================

@dataclass
class RetrievalDataset:
    """1:1 (foreign sentence, English sentence) translation pairs"""
    pairs: List[Tuple[str, str]]
    name: str = ""

    def __post_init__(self):
        # A single pair is allowed and trivially scores 1.0.
        if not self.pairs:
            raise DataValidationError(f"{self.dataset_id}: empty retrieval dataset")

    @property
    def dataset_id(self) -> str:
        return self.name or "retrieval"

    def __len__(self) -> int:
        return len(self.pairs)


def load_retrieval_dataset(path: PathLike) -> RetrievalDataset:
    """Load "foreign<TAB>english" sentence pairs."""
    rows = [(f, e) for f, e in _read_rows(path, 2)]
    return RetrievalDataset(pairs=rows, name=Path(path).stem)
