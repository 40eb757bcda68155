"""
Language-Pair Sampler

Smoothed multinomial over language pairs, q ~ p^alpha, and batch assembly
with per-slot key draws and no repeated constraint within a batch.

All randomness comes from numpy's PCG64 generator
(`numpy.random.default_rng(seed)`): keys are drawn by inverse CDF on
`rng.random()`, pool members by `rng.integers`.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from lexdata.models import ConstraintPair, language_pair_name
from schemas import DistributionEntry, DistributionReport, SamplerConfig
from utils.errors import DataValidationError

logger = logging.getLogger(__name__)

LanguagePairKey = Tuple[str, str]


def canonical_key(l1: str, l2: str) -> LanguagePairKey:
    return (l1, l2) if l1 <= l2 else (l2, l1)


@dataclass
class ConstraintIndex:
    """Constraints grouped by canonical language pair"""
    pools: Dict[LanguagePairKey, List[ConstraintPair]]

    @property
    def counts(self) -> Dict[LanguagePairKey, int]:
        return {key: len(pool) for key, pool in self.pools.items()}

    @property
    def total(self) -> int:
        return sum(len(pool) for pool in self.pools.values())

    def keys(self) -> List[LanguagePairKey]:
        return sorted(self.pools)


def build_index(pairs: Sequence[ConstraintPair]) -> ConstraintIndex:
    """Group constraints by canonical language pair, keeping input order within each pool."""
    pools: Dict[LanguagePairKey, List[ConstraintPair]] = {}
    for pair in pairs:
        pools.setdefault(canonical_key(pair.l1, pair.l2), []).append(pair)
    return ConstraintIndex(pools=dict(sorted(pools.items())))


def compute_distribution(counts: Mapping[LanguagePairKey, int], alpha: float) -> Dict[LanguagePairKey, float]:
    """
    Smoothed language-pair distribution.

    p = n / sum(n); q = p^alpha / sum(p^alpha).

    Raises:
        DataValidationError: On negative counts, all-zero counts or alpha <= 0
    """
    if alpha <= 0:
        raise DataValidationError(f"alpha must be positive, got {alpha}")
    keys = sorted(counts)
    n = np.array([counts[k] for k in keys], dtype=np.float64)
    if np.any(n < 0):
        raise DataValidationError("Language-pair counts must be non-negative")
    if n.sum() <= 0:
        raise DataValidationError("All language-pair counts are zero")
    p = n / n.sum()
    smoothed = p ** alpha
    q = smoothed / smoothed.sum()
    return {k: float(v) for k, v in zip(keys, q)}


def distribution_report(index: ConstraintIndex, alpha: float) -> DistributionReport:
    """Per-key n, p and q for the CLI."""
    counts = index.counts
    q = compute_distribution(counts, alpha)
    total = index.total
    entries = {
        language_pair_name(key): DistributionEntry(n=counts[key], p=counts[key] / total, q=q[key])
        for key in sorted(counts)
    }
    return DistributionReport(alpha=alpha, total=total, entries=entries)


def cumulative_distribution(q: Mapping[LanguagePairKey, float]) -> Tuple[List[LanguagePairKey], np.ndarray]:
    keys = sorted(q)
    return keys, np.cumsum([q[k] for k in keys])


def draw_language_pair(
    keys: Sequence[LanguagePairKey],
    cumulative: np.ndarray,
    rng: np.random.Generator,
) -> LanguagePairKey:
    """Draw one key by inverse CDF; zero-probability keys are never returned."""
    u = rng.random()
    i = int(np.searchsorted(cumulative, u, side="right"))
    if i >= len(keys):
        # u landed above a cumulative total rounded just below 1
        i = int(np.flatnonzero(np.diff(np.concatenate(([0.0], cumulative))) > 0)[-1])
    return keys[i]


@dataclass(frozen=True)
class Batch:
    """N_B constraints feeding one contrastive step"""
    pairs: Tuple[ConstraintPair, ...]

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def synset_ids(self) -> List[str]:
        return [p.synset_id for p in self.pairs]


@dataclass
class _PoolDraw:
    # Partial Fisher-Yates over pool indices, stored sparsely.
    size: int
    taken: int = 0
    swaps: Dict[int, int] = field(default_factory=dict)

    def draw(self, rng: np.random.Generator) -> int:
        j = self.taken + int(rng.integers(self.size - self.taken))
        chosen = self.swaps.get(j, j)
        self.swaps[j] = self.swaps.get(self.taken, self.taken)
        self.taken += 1
        return chosen

    @property
    def exhausted(self) -> bool:
        return self.taken >= self.size


def sample_batch(
    index: ConstraintIndex,
    q: Mapping[LanguagePairKey, float],
    config: SamplerConfig,
    rng: np.random.Generator,
) -> Batch:
    """
    Fill N_B slots: draw a key from q, then a constraint of that key not yet
    in the batch; an exhausted key is redrawn.

    Raises:
        DataValidationError: If the index is empty or holds fewer than N_B constraints
    """
    if index.total == 0:
        raise DataValidationError("Cannot sample from an empty constraint index")
    if index.total < config.batch_size:
        raise DataValidationError(
            f"Only {index.total} constraints for a batch of {config.batch_size} without repeats"
        )
    keys, cumulative = cumulative_distribution(q)
    draws: Dict[LanguagePairKey, _PoolDraw] = {}
    chosen: List[ConstraintPair] = []

    while len(chosen) < config.batch_size:
        key = draw_language_pair(keys, cumulative, rng)
        pool = index.pools[key]
        state = draws.setdefault(key, _PoolDraw(size=len(pool)))
        if state.exhausted:
            continue
        chosen.append(pool[state.draw(rng)])
    return Batch(pairs=tuple(chosen))


def epoch_plan(total_constraints: int, batch_size: int) -> int:
    """Batches per epoch: ceil(total / N_B)."""
    if total_constraints <= 0 or batch_size <= 0:
        raise DataValidationError("epoch_plan needs positive inputs")
    return math.ceil(total_constraints / batch_size)


class BatchSampler:
    """One deterministic batch stream per training run"""

    def __init__(self, index: ConstraintIndex, config: SamplerConfig):
        self.index = index
        self.config = config
        self.q = compute_distribution(index.counts, config.alpha)
        self.rng = np.random.default_rng(config.seed)
        self.batches_drawn = 0
        logger.info(
            "Sampling %d constraints over %d language pairs (alpha=%s, N_B=%d)",
            index.total, len(index.pools), config.alpha, config.batch_size,
        )

    def next_batch(self) -> Batch:
        batch = sample_batch(self.index, self.q, self.config, self.rng)
        self.batches_drawn += 1
        return batch

    def __iter__(self):
        while True:
            yield self.next_batch()
