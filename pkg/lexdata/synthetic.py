"""
Synthetic Benchmark

Two toy languages over shared latent concepts. A concept is a pair of
feature values (f1, f2); each of its words is a first syllable encoding f1
followed by a "##" continuation syllable encoding f2. The languages use
disjoint consonant inventories, so no subword is shared across them.

Every syllable token gets a "noisy image" vector: the latent vector of its
(slot, value), plus a language offset, plus nuisance noise confined to a
low-rank subspace per language. Constraints come from training concepts
only; validation and test translation pairs come from disjoint concepts.
"""

import logging
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from config.constants import CONTINUATION_PREFIX
from encoder.checkpoint import write_word_vectors
from encoder.tokenizer import SubwordVocabulary
from evalsuite.datasets import BliDataset
from lexdata.constraints_io import write_constraints
from lexdata.models import ConstraintPair
from utils.errors import ArtifactIOError, DataValidationError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SOURCE_LANGUAGE = "xa"
TARGET_LANGUAGE = "xb"

_CONSONANTS = {
    SOURCE_LANGUAGE: "kmtps",
    TARGET_LANGUAGE: "bdgln",
}
_VOWELS = "aeiou"
# Single vowels, then vowel pairs; a syllable is a consonant plus one nucleus.
_NUCLEI = list(_VOWELS) + [a + b for a, b in product(_VOWELS, repeat=2)]


@dataclass
class SyntheticBenchmark:
    vocabulary: SubwordVocabulary
    word_vectors: Dict[str, np.ndarray]
    constraints: List[ConstraintPair]
    validation: List[BliDataset]
    test: BliDataset
    words: Dict[str, List[str]]

    def write(self, out_dir: PathLike) -> Dict[str, Path]:
        """
        Write every artifact under out_dir.

        Layout: vocab.txt, vectors.txt, constraints.tsv, valid/<pair>.tsv plus
        valid/<pair>.vocab, test/<pair>.tsv plus test/<pair>.vocab.
        """
        out = Path(out_dir)
        paths = {
            "vocab": self.vocabulary.to_file(out / "vocab.txt"),
            "word_vectors": write_word_vectors(out / "vectors.txt", self.word_vectors),
            "constraints": write_constraints(self.constraints, out / "constraints.tsv"),
        }
        for ds in self.validation:
            _write_bli(ds, out / "valid")
        paths["valid_dir"] = out / "valid"
        paths["test"] = _write_bli(self.test, out / "test")
        paths["test_vocab"] = out / "test" / f"{self.test.dataset_id}.vocab"
        return paths


def _write_bli(dataset: BliDataset, directory: Path) -> Path:
    pairs_path = directory / f"{dataset.dataset_id}.tsv"
    vocab_path = directory / f"{dataset.dataset_id}.vocab"
    rows = [f"{source}\t{gold}" for source, golds in dataset.queries for gold in golds]
    try:
        directory.mkdir(parents=True, exist_ok=True)
        pairs_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        vocab_path.write_text("\n".join(dataset.vocabulary) + "\n", encoding="utf-8")
    except OSError as e:
        raise ArtifactIOError(f"Cannot write {directory}: {e}") from e
    return pairs_path


def syllable(lang: str, index: int) -> str:
    consonants = _CONSONANTS[lang]
    if index >= len(consonants) * len(_NUCLEI):
        raise DataValidationError(f"Syllable inventory of '{lang}' exhausted at index {index}")
    return consonants[index % len(consonants)] + _NUCLEI[index // len(consonants)]


def make_word(lang: str, f1: int, f2: int, synonym: int, synonyms: int) -> str:
    """Surface form; tokenizes as the f1 syllable plus the "##" f2 syllable."""
    return syllable(lang, f1 * synonyms + synonym) + syllable(lang, f2 * synonyms + synonym)


def _concept_pairs(words_a: Sequence[str], words_b: Sequence[str]) -> List[Tuple[str, str, str, str]]:
    """All synonym pairs of one concept: matched translations, other translations, then monolingual."""
    matched = [(a, SOURCE_LANGUAGE, b, TARGET_LANGUAGE) for a, b in zip(words_a, words_b)]
    crossed = [
        (a, SOURCE_LANGUAGE, b, TARGET_LANGUAGE)
        for i, a in enumerate(words_a) for j, b in enumerate(words_b) if i != j
    ]
    mono = [
        (x, lang, y, lang)
        for words, lang in ((words_a, SOURCE_LANGUAGE), (words_b, TARGET_LANGUAGE))
        for i, x in enumerate(words) for y in words[i + 1:]
    ]
    return matched + crossed + mono


def build_synthetic_benchmark(
    concepts: int = 100,
    synonyms: int = 2,
    seed: int = 0,
    dim: int = 48,
    train_concepts: int = 50,
    validation_concepts: int = 25,
    pairs_per_concept: int = 3,
    nuisance_rank: int = 2,
    nuisance_scale: float = 6.0,
    offset_scale: float = 1.0,
) -> SyntheticBenchmark:
    """
    Generate the two-language benchmark.

    Concepts are the first `concepts` cells of a 10-wide (f1, f2) grid.
    After a seeded shuffle, the first train_concepts feed the constraints,
    the next validation_concepts the two validation sets (one per
    direction) and the rest the test set. Test queries map each source word
    to its same-synonym translation; the retrieval vocabulary is every
    target-language word.

    Raises:
        DataValidationError: On inconsistent sizes
    """
    width = 10
    if concepts < 1 or concepts > width * width:
        raise DataValidationError(f"concepts must be in 1..{width * width}")
    if train_concepts + validation_concepts >= concepts:
        raise DataValidationError("Training and validation concepts leave no test concepts")
    if synonyms < 1 or dim < nuisance_rank + 1:
        raise DataValidationError("Need at least one synonym and dim > nuisance_rank")
    max_pairs = len(_concept_pairs(["a"] * synonyms, ["b"] * synonyms))
    if not 1 <= pairs_per_concept <= max_pairs:
        raise DataValidationError(f"pairs_per_concept must be in 1..{max_pairs}")

    rng = np.random.default_rng(seed)
    grid = [(i // width, i % width) for i in range(concepts)]
    languages = (SOURCE_LANGUAGE, TARGET_LANGUAGE)

    latent = {slot: rng.normal(size=(width, dim)) for slot in (1, 2)}
    offsets = {lang: rng.normal(scale=offset_scale, size=dim) for lang in languages}
    nuisance = {
        lang: np.linalg.qr(rng.normal(size=(dim, nuisance_rank)))[0] for lang in languages
    }

    vectors: Dict[str, np.ndarray] = {}
    for lang in languages:
        for value, synonym in product(range(width), range(synonyms)):
            index = value * synonyms + synonym
            first = syllable(lang, index)
            cont = CONTINUATION_PREFIX + first
            for token, slot in ((first, 1), (cont, 2)):
                noise = nuisance[lang] @ rng.normal(scale=nuisance_scale, size=nuisance_rank)
                vectors[token] = latent[slot][value] + offsets[lang] + noise

    words: Dict[str, List[str]] = {lang: [] for lang in languages}
    concept_words: List[Dict[str, List[str]]] = []
    for f1, f2 in grid:
        entry = {}
        for lang in languages:
            entry[lang] = [make_word(lang, f1, f2, s, synonyms) for s in range(synonyms)]
            words[lang].extend(entry[lang])
        concept_words.append(entry)

    order = rng.permutation(concepts)
    train_ids = order[:train_concepts]
    valid_ids = order[train_concepts:train_concepts + validation_concepts]
    test_ids = order[train_concepts + validation_concepts:]

    constraints = []
    for cid in sorted(int(c) for c in train_ids):
        f1, f2 = grid[cid]
        for w1, l1, w2, l2 in _concept_pairs(concept_words[cid][SOURCE_LANGUAGE],
                                             concept_words[cid][TARGET_LANGUAGE])[:pairs_per_concept]:
            constraints.append(ConstraintPair(w1=w1, l1=l1, w2=w2, l2=l2, synset_id=f"syn:{f1}{f2}"))

    def translation_set(ids, src, tgt, name) -> BliDataset:
        queries = []
        for cid in sorted(int(c) for c in ids):
            for s in range(synonyms):
                queries.append((concept_words[cid][src][s], [concept_words[cid][tgt][s]]))
        return BliDataset(src=src, tgt=tgt, queries=queries, vocabulary=list(words[tgt]), name=name)

    validation = [
        translation_set(valid_ids, SOURCE_LANGUAGE, TARGET_LANGUAGE, f"{SOURCE_LANGUAGE}-{TARGET_LANGUAGE}"),
        translation_set(valid_ids, TARGET_LANGUAGE, SOURCE_LANGUAGE, f"{TARGET_LANGUAGE}-{SOURCE_LANGUAGE}"),
    ]
    test = translation_set(test_ids, SOURCE_LANGUAGE, TARGET_LANGUAGE, f"{SOURCE_LANGUAGE}-{TARGET_LANGUAGE}")

    vocabulary = SubwordVocabulary(sorted(vectors))
    logger.info(
        "Synthetic benchmark: %d constraints, %d validation sets, %d test queries, %d tokens",
        len(constraints), len(validation), len(test), len(vocabulary),
    )
    return SyntheticBenchmark(
        vocabulary=vocabulary,
        word_vectors=vectors,
        constraints=constraints,
        validation=validation,
        test=test,
        words=words,
    )
