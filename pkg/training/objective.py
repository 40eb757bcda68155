"""
Contrastive Objective

InfoNCE variant over a batch of synonym pairs. Every ordered pair of word
instances sharing a synset is a positive; the negatives of an anchor are
all instances from pairs of other synsets. Similarity is exp(cos / tau).
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from autodiff import ops
from autodiff.tensor import Tensor
from schemas import LossConfig
from utils.errors import DataValidationError

FIRST = "first"
SECOND = "second"


@dataclass
class BatchEmbeddings:
    """
    2 * N_B word-instance embeddings; instance 2i is the first word of pair i
    and instance 2i + 1 the second.
    """
    vectors: Tensor
    synset_ids: List[str]
    slots: List[str]
    pair_index: List[int]

    def __post_init__(self):
        n = len(self.synset_ids)
        if self.vectors.data.ndim != 2 or self.vectors.shape[0] != n:
            raise DataValidationError(
                f"Expected {n} embedding rows, got tensor of shape {self.vectors.shape}"
            )
        if not (len(self.slots) == len(self.pair_index) == n):
            raise DataValidationError("synset_ids, slots and pair_index must align")
        if not np.all(np.isfinite(self.vectors.data)):
            raise DataValidationError("Batch embeddings contain non-finite values")

    def __len__(self) -> int:
        return len(self.synset_ids)

    @classmethod
    def from_pairs(cls, first: Sequence[Tensor], second: Sequence[Tensor], synset_ids: Sequence[str]) -> "BatchEmbeddings":
        if not (len(first) == len(second) == len(synset_ids)):
            raise DataValidationError("first, second and synset_ids must have equal length")
        rows, syn, slots, index = [], [], [], []
        for i, (a, b, sid) in enumerate(zip(first, second, synset_ids)):
            rows.extend([a, b])
            syn.extend([sid, sid])
            slots.extend([FIRST, SECOND])
            index.extend([i, i])
        return cls(vectors=ops.concat_rows(rows), synset_ids=syn, slots=slots, pair_index=index)


def build_positive_set(batch: BatchEmbeddings, mode: str = "all") -> List[Tuple[int, int]]:
    """
    Ordered positive pairs (u, v) of distinct instances with equal synset ids.

    mode "cross_slot" keeps only pairs whose slots differ.
    """
    if len(batch) < 2:
        raise DataValidationError("A batch needs at least one pair")
    positives = []
    for u, sid_u in enumerate(batch.synset_ids):
        for v, sid_v in enumerate(batch.synset_ids):
            if u == v or sid_u != sid_v:
                continue
            if mode == "cross_slot" and batch.slots[u] == batch.slots[v]:
                continue
            positives.append((u, v))
    return positives


def negative_mask(batch: BatchEmbeddings) -> np.ndarray:
    """mask[u, n] = 1 when instance n belongs to another synset than u."""
    syn = np.array(batch.synset_ids, dtype=object)
    return (syn[:, None] != syn[None, :]).astype(np.float64)


def info_nce_loss(batch: BatchEmbeddings, config: LossConfig) -> Tensor:
    """
    Mean over positives (u, v) of -log(s_uv / (s_uv + sum_n s_un)),
    with s_xy = exp(cos(e_x, e_y) / tau).

    Raises:
        DataValidationError: If there are no positives
        NumericalError: If an embedding has zero norm
    """
    positives = build_positive_set(batch, config.positive_pairs)
    if not positives:
        raise DataValidationError("No positive pairs in batch")
    n = len(batch)

    pos_mask = np.zeros((n, n))
    for u, v in positives:
        pos_mask[u, v] = 1.0

    unit = ops.l2_normalize(batch.vectors)
    cos = ops.matmul(unit, unit, transpose_b=True)
    sim = ops.exp(ops.scale(cos, 1.0 / config.tau))

    # Row sums of negative similarities, spread across each row.
    neg = ops.mul_elementwise(sim, Tensor(negative_mask(batch)))
    neg_sum = ops.matmul(ops.matmul(neg, Tensor(np.ones((n, 1)))), Tensor(np.ones((1, n))))

    terms = ops.add(ops.log(sim), ops.scale(ops.log(ops.add(sim, neg_sum)), -1.0))
    picked = ops.mul_elementwise(terms, Tensor(pos_mask))
    return ops.scale(ops.mean_axis(picked), -float(n * n) / len(positives))
