"""
Resource Loaders

Readers for the synset dump, frequency lists, stopword and exclusion files.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Set, Tuple, Union

import orjson

from config.constants import FREQUENCY_FILE_SUFFIX
from lexdata.models import FrequencyList, SynsetRecord, dict_to_synset
from utils.errors import ArtifactIOError, DataValidationError
from utils.validators import validate_language_code

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_lines(path: PathLike) -> List[str]:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            return f.read().splitlines()
    except FileNotFoundError as e:
        raise ArtifactIOError(f"File not found: {path}") from e
    except OSError as e:
        raise ArtifactIOError(f"Cannot read {path}: {e}") from e


def load_synset_dump(path: PathLike) -> List[SynsetRecord]:
    """
    Load a JSON-lines synset dump.

    Args:
        path: Dump file, one JSON object per line

    Returns:
        List of SynsetRecord models in file order

    Raises:
        ArtifactIOError: If the file is missing
        DataValidationError: On a malformed line (with line number) or a duplicate synset id
    """
    records = []
    seen: Dict[str, int] = {}

    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        try:
            data = orjson.loads(line)
        except orjson.JSONDecodeError as e:
            raise DataValidationError(f"{path}:{lineno}: malformed JSON ({e})") from e
        try:
            record = dict_to_synset(data)
        except DataValidationError as e:
            raise DataValidationError(f"{path}:{lineno}: {e}") from e

        if record.synset_id in seen:
            raise DataValidationError(
                f"{path}:{lineno}: duplicate synset_id '{record.synset_id}' "
                f"(first seen on line {seen[record.synset_id]})"
            )
        seen[record.synset_id] = lineno
        records.append(record)

    logger.info("Loaded %d synsets from %s", len(records), path)
    return records


def load_frequency_list(path: PathLike, lang: str) -> FrequencyList:
    """
    Load a frequency list (one word per line, most frequent first).

    Repeated words keep their first, highest rank.
    """
    words = []
    seen = set()
    for line in _read_lines(path):
        word = line.strip()
        if not word or word in seen:
            continue
        seen.add(word)
        words.append(word)
    return FrequencyList(lang=lang, words=words)


def load_frequency_lists(freq_dir: PathLike, languages: Iterable[str]) -> Dict[str, FrequencyList]:
    """
    Load `<lang>.freq` for every requested language.

    Raises:
        DataValidationError: If a language has no frequency file
    """
    freq_dir = Path(freq_dir)
    lists = {}
    missing = []
    for lang in sorted(languages):
        path = freq_dir / f"{lang}{FREQUENCY_FILE_SUFFIX}"
        if not path.is_file():
            missing.append(lang)
            continue
        lists[lang] = load_frequency_list(path, lang)
    if missing:
        raise DataValidationError(
            f"No frequency list for language(s): {', '.join(missing)} in {freq_dir}"
        )
    return lists


def load_word_set(path: PathLike) -> Set[str]:
    """Load a set of words (e.g. stopwords), one per line."""
    return {line.strip() for line in _read_lines(path) if line.strip()}


def load_exclusions(path: PathLike) -> Set[Tuple[str, str]]:
    """
    Load exclusion words from a TSV of `word<TAB>lang` rows.

    Raises:
        DataValidationError: On a row without exactly two columns or a bad language code
    """
    exclusions = set()
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise DataValidationError(f"{path}:{lineno}: expected 2 columns, got {len(cols)}")
        word, lang = cols
        is_valid, error = validate_language_code(lang)
        if not is_valid:
            raise DataValidationError(f"{path}:{lineno}: {error}")
        exclusions.add((word, lang))
    return exclusions


def collect_exclusions(datasets: Iterable) -> Set[Tuple[str, str]]:
    """
    Gather (word, lang) exclusions from evaluation datasets.

    Every dataset exposes `exclusion_words()`; used to keep test and
    validation words out of the mined constraints.
    """
    exclusions: Set[Tuple[str, str]] = set()
    for dataset in datasets:
        exclusions |= dataset.exclusion_words()
    return exclusions
