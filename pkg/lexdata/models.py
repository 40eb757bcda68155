"""
Lexical Data Models

Dataclass models for synsets, mined constraints and frequency lists.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from utils.errors import DataValidationError
from utils.validators import validate_language_code, validate_synset_id, validate_word


@dataclass(frozen=True)
class Lemma:
    """One lemma of a synset in one language"""
    lang: str
    text: str
    is_auto_translation: bool = False
    is_redirection: bool = False


@dataclass(frozen=True)
class Gloss:
    """A sentence explaining the synset's concept"""
    lang: str
    text: str


@dataclass(frozen=True)
class SynsetRecord:
    """One multilingual synset from the dump"""
    synset_id: str
    is_named_entity: bool
    lemmas: Tuple[Lemma, ...]
    glosses: Tuple[Gloss, ...]


@dataclass(frozen=True)
class ConstraintPair:
    """A mined synonym pair, optionally with glosses; the training atom"""
    w1: str
    l1: str
    w2: str
    l2: str
    synset_id: str
    g1: Optional[str] = None
    gl1: Optional[str] = None
    g2: Optional[str] = None
    gl2: Optional[str] = None

    def __post_init__(self):
        for word in (self.w1, self.w2):
            is_valid, error = validate_word(word)
            if not is_valid:
                raise DataValidationError(error)
        if self.w1 == self.w2 and self.l1 == self.l2:
            raise DataValidationError(f"Self-pair {self.w1}@{self.l1} in {self.synset_id}")
        if self.g1 is not None and self.gl1 == self.l1:
            raise DataValidationError(f"Gloss language of slot 1 equals word language '{self.l1}'")
        if self.g2 is not None and self.gl2 == self.l2:
            raise DataValidationError(f"Gloss language of slot 2 equals word language '{self.l2}'")

    @property
    def language_pair(self) -> Tuple[str, str]:
        """Canonical (l_lo, l_hi) key"""
        return (self.l1, self.l2) if self.l1 <= self.l2 else (self.l2, self.l1)

    def canonical_key(self) -> Tuple[Tuple[str, str], Tuple[str, str], str]:
        """(min(w@l), max(w@l), synset_id) used for deduplication"""
        a = (self.w1, self.l1)
        b = (self.w2, self.l2)
        lo, hi = (a, b) if a <= b else (b, a)
        return lo, hi, self.synset_id


@dataclass
class FrequencyList:
    """Words of one language in descending frequency"""
    lang: str
    words: List[str]
    _ranks: Dict[str, int] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        seen = {}
        for i, word in enumerate(self.words):
            if word in seen:
                raise DataValidationError(
                    f"Duplicate word '{word}' in frequency list for '{self.lang}'"
                )
            seen[word] = i + 1
        self._ranks = seen

    def rank(self, word: str) -> float:
        """1-based rank; words absent from the list rank at infinity"""
        return self._ranks.get(word, float("inf"))

    def __len__(self) -> int:
        return len(self.words)


def language_pair_name(key: Tuple[str, str]) -> str:
    """Render a language-pair key as "l_lo-l_hi"."""
    return f"{key[0]}-{key[1]}"


def dict_to_synset(data: dict) -> SynsetRecord:
    """
    Convert a dump dict to a SynsetRecord model.

    Raises:
        DataValidationError: If fields are missing or violate the record invariants
    """
    try:
        synset_id = data["synset_id"]
        is_named_entity = data["is_named_entity"]
        raw_lemmas = data["lemmas"]
        raw_glosses = data["glosses"]
    except (KeyError, TypeError) as e:
        raise DataValidationError(f"Missing synset field: {e}") from e

    is_valid, error = validate_synset_id(synset_id if isinstance(synset_id, str) else "")
    if not is_valid:
        raise DataValidationError(error)
    if not isinstance(is_named_entity, bool):
        raise DataValidationError(f"{synset_id}: is_named_entity must be a boolean")

    lemmas = []
    for raw in raw_lemmas:
        lang = raw.get("lang", "")
        text = raw.get("text", "")
        is_valid, error = validate_language_code(lang)
        if not is_valid:
            raise DataValidationError(f"{synset_id}: {error}")
        if not text:
            raise DataValidationError(f"{synset_id}: empty lemma text")
        lemmas.append(Lemma(
            lang=lang,
            text=text,
            is_auto_translation=bool(raw.get("is_auto_translation", False)),
            is_redirection=bool(raw.get("is_redirection", False)),
        ))

    glosses = []
    for raw in raw_glosses:
        lang = raw.get("lang", "")
        is_valid, error = validate_language_code(lang)
        if not is_valid:
            raise DataValidationError(f"{synset_id}: {error}")
        glosses.append(Gloss(lang=lang, text=raw.get("text", "")))

    return SynsetRecord(
        synset_id=synset_id,
        is_named_entity=is_named_entity,
        lemmas=tuple(lemmas),
        glosses=tuple(glosses),
    )


def synset_to_dict(record: SynsetRecord) -> dict:
    """Convert a SynsetRecord back to its dump dict."""
    return {
        "synset_id": record.synset_id,
        "is_named_entity": record.is_named_entity,
        "lemmas": [
            {
                "lang": lemma.lang,
                "text": lemma.text,
                "is_auto_translation": lemma.is_auto_translation,
                "is_redirection": lemma.is_redirection,
            }
            for lemma in record.lemmas
        ],
        "glosses": [{"lang": g.lang, "text": g.text} for g in record.glosses],
    }
