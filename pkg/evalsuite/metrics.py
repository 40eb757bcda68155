"""
Ranking and Correlation Metrics

Pure numpy/scipy scoring functions. Ties are broken by candidate order
everywhere: among equal scores, the candidate listed first ranks higher.
"""

from typing import List, Optional, Sequence

import numpy as np
from scipy.stats import rankdata, spearmanr

from utils.errors import DataValidationError, NumericalError


def normalize_rows(matrix: np.ndarray) -> np.ndarray:
    """
    Unit-length rows.

    Raises:
        NumericalError: If a row has zero norm
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=-1, keepdims=True)
    if np.any(norms == 0):
        bad = int(np.flatnonzero(norms.reshape(-1) == 0)[0])
        raise NumericalError(f"Row {bad} has zero norm; cosine is undefined")
    return matrix / norms


def cosine_matrix(queries: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    return normalize_rows(queries) @ normalize_rows(candidates).T


def rank_of(scores: np.ndarray, index: int) -> int:
    """1-based rank of candidate `index` under descending score, ties by candidate order."""
    target = scores[index]
    return 1 + int(np.sum(scores > target)) + int(np.sum(scores[:index] == target))


def reciprocal_rank(scores: np.ndarray, gold: Sequence[int]) -> float:
    """1 / rank of the best-ranked gold candidate."""
    if len(gold) == 0:
        raise DataValidationError("A query needs at least one gold candidate")
    return 1.0 / min(rank_of(scores, g) for g in gold)


def mrr_from_scores(scores: np.ndarray, golds: Sequence[Sequence[int]]) -> float:
    """
    Mean reciprocal rank over queries.

    Args:
        scores: (queries, candidates) similarity matrix
        golds: Gold candidate indices per query

    Raises:
        DataValidationError: If there are no queries or the shapes disagree
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[0] == 0:
        raise DataValidationError("MRR needs at least one query")
    if len(golds) != scores.shape[0]:
        raise DataValidationError(f"{scores.shape[0]} score rows but {len(golds)} gold lists")
    return float(np.mean([reciprocal_rank(row, gold) for row, gold in zip(scores, golds)]))


def mrr_from_ranks(ranks: Sequence[int]) -> float:
    if not ranks:
        raise DataValidationError("MRR needs at least one rank")
    return float(np.mean([1.0 / r for r in ranks]))


def nearest_neighbour_accuracy(scores: np.ndarray) -> float:
    """Share of rows whose argmax (first maximum on ties) is the diagonal entry."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[0] == 0:
        raise DataValidationError("Accuracy needs at least one query")
    if scores.shape[0] != scores.shape[1]:
        raise DataValidationError(f"Retrieval scores must be square, got {scores.shape}")
    hits = np.argmax(scores, axis=1) == np.arange(scores.shape[0])
    return float(np.mean(hits))


def spearman(human: Sequence[float], model: Sequence[float]) -> Optional[float]:
    """
    Spearman's rho with average ranks for ties.

    Returns:
        rho, or None when either side is constant (rho undefined)
    """
    human = np.asarray(human, dtype=np.float64)
    model = np.asarray(model, dtype=np.float64)
    if human.shape != model.shape or human.ndim != 1:
        raise DataValidationError("Spearman needs two equal-length score vectors")
    if human.size < 2:
        raise DataValidationError("Spearman needs at least 2 entries")
    if np.ptp(human) == 0 or np.ptp(model) == 0:
        return None
    rho = spearmanr(human, model)[0]
    return float(np.clip(rho, -1.0, 1.0))


# ----------------------------------------------------------------------
# Exhaustive references
# ----------------------------------------------------------------------

def _stable_descending(row: np.ndarray) -> np.ndarray:
    return np.argsort(-row, kind="stable")


def brute_force_mrr(queries: np.ndarray, candidates: np.ndarray, golds: Sequence[Sequence[int]]) -> float:
    """MRR from a full cosine matrix and a stable argsort of every row."""
    scores = cosine_matrix(queries, candidates)
    ranks: List[int] = []
    for row, gold in zip(scores, golds):
        order = list(_stable_descending(row))
        ranks.append(1 + min(order.index(g) for g in gold))
    return mrr_from_ranks(ranks)


def brute_force_accuracy(queries: np.ndarray, candidates: np.ndarray) -> float:
    scores = cosine_matrix(queries, candidates)
    hits = [int(_stable_descending(row)[0]) == i for i, row in enumerate(scores)]
    return float(np.mean(hits))


def rank_pearson(human: Sequence[float], model: Sequence[float]) -> float:
    """Spearman computed as Pearson correlation of fractional ranks."""
    return float(np.corrcoef(rankdata(human), rankdata(model))[0, 1])
