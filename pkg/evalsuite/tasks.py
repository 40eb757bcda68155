"""
Evaluation Tasks

BLI by MRR, cross-lingual word similarity by Spearman's rho, and sentence
retrieval by nearest-neighbour accuracy, for a single layer or swept over
layers 0..L. The model is only read.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from encoder.model import EncoderModel, WordEncoding, encode_sentence, encode_type
from evalsuite.datasets import BliDataset, RetrievalDataset, XlsimDataset
from evalsuite.metrics import (
    cosine_matrix,
    mrr_from_scores,
    nearest_neighbour_accuracy,
    normalize_rows,
    spearman,
)
from schemas import EvalReport
from utils.errors import DataValidationError

logger = logging.getLogger(__name__)

Dataset = Union[BliDataset, XlsimDataset, RetrievalDataset]


# ============================================================================
# EMBEDDING
# ============================================================================

def _stack(encodings: Sequence[WordEncoding], num_layers: int) -> np.ndarray:
    """(layers + 1, items, dim) array of pooled vectors."""
    return np.stack([
        np.stack([enc.vector(layer) for enc in encodings]) for layer in range(num_layers + 1)
    ])


def embed_words(model: EncoderModel, words: Sequence[str]) -> np.ndarray:
    """Type-level vectors of every word at every layer; each distinct word is encoded once."""
    cache: Dict[str, WordEncoding] = {}
    for word in words:
        if word not in cache:
            cache[word] = encode_type(word, model)
    return _stack([cache[w] for w in words], model.num_layers)


def embed_sentences(model: EncoderModel, sentences: Sequence[str]) -> np.ndarray:
    return _stack([encode_sentence(s, model) for s in sentences], model.num_layers)


def _check_layer(model: EncoderModel, layer: int) -> None:
    if not 0 <= layer <= model.num_layers:
        raise DataValidationError(f"Layer {layer} outside 0..{model.num_layers}")


# ============================================================================
# BLI
# ============================================================================

def _bli_scores(model: EncoderModel, dataset: BliDataset) -> List[float]:
    if len(dataset) == 0:
        raise DataValidationError(f"{dataset.dataset_id}: empty BLI dataset")
    sources = embed_words(model, [s for s, _ in dataset.queries])
    targets = embed_words(model, dataset.vocabulary)
    golds = dataset.gold_indices()
    return [
        mrr_from_scores(cosine_matrix(sources[layer], targets[layer]), golds)
        for layer in range(model.num_layers + 1)
    ]


def bli_mrr(model: EncoderModel, layer: int, dataset: BliDataset) -> float:
    """
    Mean reciprocal rank of the best-ranked gold over the target vocabulary.

    Raises:
        DataValidationError: On an empty dataset or a layer out of range
    """
    _check_layer(model, layer)
    if len(dataset) == 0:
        raise DataValidationError(f"{dataset.dataset_id}: empty BLI dataset")
    sources = embed_words(model, [s for s, _ in dataset.queries])[layer]
    targets = embed_words(model, dataset.vocabulary)[layer]
    return mrr_from_scores(cosine_matrix(sources, targets), dataset.gold_indices())


# ============================================================================
# XLSIM
# ============================================================================

def _pair_cosines(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    return np.sum(normalize_rows(first) * normalize_rows(second), axis=1)


def _xlsim_scores(model: EncoderModel, dataset: XlsimDataset) -> List[Optional[float]]:
    first = embed_words(model, [w1 for w1, _, _ in dataset.entries])
    second = embed_words(model, [w2 for _, w2, _ in dataset.entries])
    human = [score for _, _, score in dataset.entries]
    return [
        spearman(human, _pair_cosines(first[layer], second[layer]))
        for layer in range(model.num_layers + 1)
    ]


def xlsim_spearman(model: EncoderModel, layer: int, dataset: XlsimDataset) -> Optional[float]:
    """
    Spearman correlation between human scores and model cosines.

    Returns:
        rho, or None when model or human scores are constant
    """
    _check_layer(model, layer)
    return _xlsim_scores(model, dataset)[layer]


# ============================================================================
# SENTENCE RETRIEVAL
# ============================================================================

def _retrieval_scores(model: EncoderModel, dataset: RetrievalDataset) -> List[float]:
    foreign = embed_sentences(model, [f for f, _ in dataset.pairs])
    english = embed_sentences(model, [e for _, e in dataset.pairs])
    return [
        nearest_neighbour_accuracy(cosine_matrix(foreign[layer], english[layer]))
        for layer in range(model.num_layers + 1)
    ]


def sentence_retrieval_accuracy(model: EncoderModel, layer: int, dataset: RetrievalDataset) -> float:
    """Share of foreign sentences whose nearest English sentence is their translation."""
    _check_layer(model, layer)
    return _retrieval_scores(model, dataset)[layer]


# ============================================================================
# LAYER SWEEP
# ============================================================================

_SWEEPS: Dict[str, Callable] = {
    "bli": _bli_scores,
    "xlsim": _xlsim_scores,
    "retrieval": _retrieval_scores,
}

_DATASET_TYPES = {
    "bli": BliDataset,
    "xlsim": XlsimDataset,
    "retrieval": RetrievalDataset,
}


def best_layer(scores: Sequence[Optional[float]]) -> Optional[int]:
    """Index of the highest defined score; ties go to the lowest index."""
    best = None
    for layer, score in enumerate(scores):
        if score is None:
            continue
        if best is None or score > scores[best]:
            best = layer
    return best


def build_report(task: str, dataset_id: str, scores: Sequence[Optional[float]], checkpoint_id: str = "") -> EvalReport:
    layer = best_layer(scores)
    return EvalReport(
        task=task,
        dataset_id=dataset_id,
        layer_scores=list(scores),
        best_layer=layer,
        best_score=None if layer is None else scores[layer],
        checkpoint_id=checkpoint_id,
    )


def layer_sweep(model: EncoderModel, dataset: Dataset, task: str, checkpoint_id: str = "") -> EvalReport:
    """
    Score every layer 0..L and report the best one.

    The forward pass of each item yields all layers at once, so every layer
    is scored from one set of encodings.

    Raises:
        DataValidationError: On an unknown task or a dataset of the wrong type
    """
    if task not in _SWEEPS:
        raise DataValidationError(f"Unknown task '{task}'; expected one of {sorted(_SWEEPS)}")
    if not isinstance(dataset, _DATASET_TYPES[task]):
        raise DataValidationError(f"Task '{task}' needs a {_DATASET_TYPES[task].__name__}")
    scores = _SWEEPS[task](model, dataset)
    report = build_report(task, dataset.dataset_id, scores, checkpoint_id)
    logger.info(
        "%s on %s: best layer %s (%s)", task, dataset.dataset_id, report.best_layer, report.best_score
    )
    return report


def evaluate_layer(model: EncoderModel, dataset: Dataset, task: str, layer: int, checkpoint_id: str = "") -> EvalReport:
    """Single-layer report; other layers are left undefined."""
    _check_layer(model, layer)
    if task not in _SWEEPS:
        raise DataValidationError(f"Unknown task '{task}'; expected one of {sorted(_SWEEPS)}")
    if not isinstance(dataset, _DATASET_TYPES[task]):
        raise DataValidationError(f"Task '{task}' needs a {_DATASET_TYPES[task].__name__}")
    single = {
        "bli": bli_mrr,
        "xlsim": xlsim_spearman,
        "retrieval": sentence_retrieval_accuracy,
    }[task](model, layer, dataset)
    scores: List[Optional[float]] = [None] * (model.num_layers + 1)
    scores[layer] = single
    return build_report(task, dataset.dataset_id, scores, checkpoint_id)
