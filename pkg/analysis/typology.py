"""
Typology Analysis

Typological diversity of a language sample (mean per-feature Shannon
entropy, base 2) and train-test similarity of language feature vectors.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.stats import entropy

from schemas import DiversityReport
from utils.errors import ArtifactIOError, DataValidationError, NumericalError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass
class FeatureMatrix:
    """language code -> K feature values"""
    vectors: Dict[str, np.ndarray]

    def __post_init__(self):
        lengths = {len(v) for v in self.vectors.values()}
        if len(lengths) > 1:
            raise DataValidationError(f"Feature vectors have different lengths: {sorted(lengths)}")
        for lang, values in self.vectors.items():
            if not np.all(np.isfinite(values)):
                raise DataValidationError(f"Non-finite feature value for language '{lang}'")

    @property
    def num_features(self) -> int:
        return len(next(iter(self.vectors.values()))) if self.vectors else 0

    @property
    def languages(self) -> List[str]:
        return sorted(self.vectors)

    def rows(self, languages: Iterable[str]) -> np.ndarray:
        """Stacked vectors of the given languages.

        Raises:
            DataValidationError: If a language is missing from the matrix
        """
        languages = list(languages)
        missing = sorted(set(languages) - set(self.vectors))
        if missing:
            raise DataValidationError(f"Languages missing from the feature matrix: {missing}")
        return np.stack([self.vectors[lang] for lang in languages])


def load_feature_matrix(path: PathLike) -> FeatureMatrix:
    """
    Read a CSV with header "lang,f1,...,fK", one row per language.

    Raises:
        ArtifactIOError: If the file cannot be read
        DataValidationError: On a missing lang column, repeated languages or non-numeric values
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError as e:
        raise ArtifactIOError(f"File not found: {path}") from e
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataValidationError(f"Cannot parse feature matrix {path}: {e}") from e

    if "lang" not in frame.columns:
        raise DataValidationError(f"{path}: first column must be 'lang'")
    frame["lang"] = frame["lang"].astype(str)
    duplicated = frame["lang"][frame["lang"].duplicated()].tolist()
    if duplicated:
        raise DataValidationError(f"{path}: repeated languages {sorted(duplicated)}")
    features = frame.drop(columns=["lang"])
    try:
        values = features.to_numpy(dtype=np.float64)
    except ValueError as e:
        raise DataValidationError(f"{path}: non-numeric feature value ({e})") from e

    matrix = FeatureMatrix({lang: row for lang, row in zip(frame["lang"], values)})
    logger.info("Loaded %d features for %d languages from %s", matrix.num_features, len(matrix.vectors), path)
    return matrix


def _as_set(languages: Iterable[str]) -> List[str]:
    """Language samples are sets: repeated codes collapse, first-seen order kept."""
    return list(dict.fromkeys(languages))


def typological_diversity(sample: Sequence[str], features: FeatureMatrix) -> float:
    """
    d_typ: mean over features of the base-2 entropy of the sample's values.

    Values are grouped by exact equality. Identical vectors and singleton
    samples give 0.

    Raises:
        DataValidationError: On an empty sample or a language missing from the matrix
    """
    if not sample:
        raise DataValidationError("Diversity needs a non-empty language sample")
    rows = features.rows(_as_set(sample))
    if rows.shape[1] == 0:
        raise DataValidationError("Feature matrix has no features")
    scores = []
    for column in rows.T:
        _, counts = np.unique(column, return_counts=True)
        scores.append(entropy(counts, base=2) if len(counts) > 1 else 0.0)
    return float(np.mean(scores))


def train_test_similarity(
    train_sample: Sequence[str],
    test_langs: Sequence[str],
    features: FeatureMatrix,
) -> float:
    """
    Mean cosine similarity over all (train, test) language pairs.

    Raises:
        DataValidationError: If either set is empty or not covered by the matrix
        NumericalError: If a feature vector has zero norm
    """
    if not train_sample or not test_langs:
        raise DataValidationError("Both language sets must be non-empty")
    train_sample, test_langs = _as_set(train_sample), _as_set(test_langs)
    train = features.rows(train_sample)
    test = features.rows(test_langs)
    for name, block, langs in (("train", train, train_sample), ("test", test, test_langs)):
        norms = np.linalg.norm(block, axis=1)
        if np.any(norms == 0):
            lang = list(langs)[int(np.flatnonzero(norms == 0)[0])]
            raise NumericalError(f"Feature vector of {name} language '{lang}' has zero norm")
    train = train / np.linalg.norm(train, axis=1, keepdims=True)
    test = test / np.linalg.norm(test, axis=1, keepdims=True)
    return float(np.mean(train @ test.T))


def diversity_report(
    sample: Sequence[str],
    features: FeatureMatrix,
    test_langs: Optional[Sequence[str]] = None,
) -> DiversityReport:
    sim = train_test_similarity(sample, test_langs, features) if test_langs else None
    return DiversityReport(
        sample=sorted(set(sample)),
        d_typ=typological_diversity(sample, features),
        sim_train_test=sim,
        test_languages=sorted(set(test_langs)) if test_langs else None,
    )


def sample_language_sets(
    pool: Iterable[str],
    sample_size: int,
    n_samples: int,
    n_bins: int,
    features: FeatureMatrix,
    exclude: Iterable[str] = (),
    seed: int = 0,
) -> List[DiversityReport]:
    """
    Diversity sweep: draw random samples, bin them by d_typ, keep one per bin.

    Samples never contain excluded (test) languages. Bins split the observed
    d_typ range into n_bins equal-width intervals; one sample is picked at
    random from every non-empty bin. When exclusions are given they are
    treated as test languages for the similarity column.

    Returns:
        One report per non-empty bin, in ascending d_typ order

    Raises:
        DataValidationError: If the pool minus exclusions is smaller than sample_size
    """
    excluded = set(exclude)
    candidates = sorted(set(pool) - excluded)
    if sample_size < 1 or len(candidates) < sample_size:
        raise DataValidationError(
            f"Cannot draw samples of {sample_size} from {len(candidates)} candidate languages"
        )
    if n_samples < 1 or n_bins < 1:
        raise DataValidationError("n_samples and n_bins must be positive")

    rng = np.random.default_rng(seed)
    samples = [
        sorted(candidates[i] for i in rng.choice(len(candidates), size=sample_size, replace=False))
        for _ in range(n_samples)
    ]
    scores = np.array([typological_diversity(s, features) for s in samples])
    edges = np.linspace(scores.min(), scores.max(), n_bins + 1)
    bins = np.clip(np.digitize(scores, edges[1:-1], right=True), 0, n_bins - 1)

    test_langs = sorted(excluded) if excluded else None
    reports = []
    for b in range(n_bins):
        members = np.flatnonzero(bins == b)
        if members.size == 0:
            continue
        chosen = samples[int(members[rng.integers(members.size)])]
        reports.append(diversity_report(chosen, features, test_langs))
    logger.info("Kept %d of %d bins from %d samples", len(reports), n_bins, n_samples)
    return reports
