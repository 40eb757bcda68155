"""
Constraint-Budget Ablations

Distribution-preserving subsets of a constraint set, and fixed per-pair
budgets across a language sample.
"""

import logging
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from lexdata.models import ConstraintPair, language_pair_name
from schemas import QuotaReport
from training.sampler import LanguagePairKey, build_index
from utils.errors import DataValidationError

logger = logging.getLogger(__name__)


def apportion(counts: Mapping[LanguagePairKey, int], target: int) -> Dict[LanguagePairKey, int]:
    """
    Largest-remainder quotas of target over counts.

    Remainders are compared exactly (integer arithmetic); ties go to the
    larger count, then to the lexicographically smaller key.

    Raises:
        DataValidationError: If target is outside 0..sum(counts)
    """
    total = sum(counts.values())
    if total <= 0:
        raise DataValidationError("Cannot apportion over empty counts")
    if not 0 <= target <= total:
        raise DataValidationError(f"Target {target} outside 0..{total}")
    quotas = {key: (target * n) // total for key, n in counts.items()}
    remainders = {key: (target * n) % total for key, n in counts.items()}
    leftover = target - sum(quotas.values())
    order = sorted(counts, key=lambda k: (-remainders[k], -counts[k], k))
    for key in order[:leftover]:
        quotas[key] += 1
    return quotas


def subset_constraints(
    constraints: Sequence[ConstraintPair],
    target_size: int,
    seed: int = 0,
) -> List[ConstraintPair]:
    """
    Subset of exactly target_size constraints with the same language-pair
    distribution.

    Within each pair, members are drawn uniformly without replacement from
    numpy's seeded generator; keys are visited in sorted order and the
    output keeps the input order within each key.

    Raises:
        DataValidationError: If target_size is not in 1..len(constraints)
    """
    if not 0 < target_size <= len(constraints):
        raise DataValidationError(
            f"Subset size {target_size} outside 1..{len(constraints)}"
        )
    index = build_index(constraints)
    quotas = apportion(index.counts, target_size)
    rng = np.random.default_rng(seed)
    subset: List[ConstraintPair] = []
    for key in index.keys():
        pool = index.pools[key]
        chosen = np.sort(rng.choice(len(pool), size=quotas[key], replace=False))
        subset.extend(pool[i] for i in chosen)
    return subset


def subset_report(constraints: Sequence[ConstraintPair], target_size: int) -> QuotaReport:
    quotas = apportion(build_index(constraints).counts, target_size)
    return QuotaReport(
        target=target_size,
        total=len(constraints),
        quotas={language_pair_name(k): v for k, v in sorted(quotas.items())},
    )


def fixed_budget_mining_plan(languages: Iterable[str], per_pair_budget: int) -> Dict[LanguagePairKey, int]:
    """
    Equal budget for every monolingual and cross-lingual key: n(n+1)/2 keys.

    Raises:
        DataValidationError: If the budget is not positive or no languages are given
    """
    if per_pair_budget <= 0:
        raise DataValidationError(f"Per-pair budget must be positive, got {per_pair_budget}")
    langs = sorted(set(languages))
    if not langs:
        raise DataValidationError("No languages given")
    return {key: per_pair_budget for key in combinations_with_replacement(langs, 2)}


def apply_quota(
    pairs: Sequence[ConstraintPair],
    plan: Mapping[LanguagePairKey, int],
    seed: int = 0,
) -> Tuple[List[ConstraintPair], QuotaReport]:
    """
    Cap every planned key at its budget; unplanned keys are dropped.

    Keys with fewer constraints than budgeted keep all of them and are
    reported as shortfalls.
    """
    index = build_index(pairs)
    rng = np.random.default_rng(seed)
    kept: List[ConstraintPair] = []
    taken: Dict[str, int] = {}
    shortfalls: Dict[str, int] = {}
    for key in sorted(plan):
        budget = plan[key]
        pool = index.pools.get(key, [])
        if len(pool) <= budget:
            chosen = np.arange(len(pool))
            if len(pool) < budget:
                shortfalls[language_pair_name(key)] = budget - len(pool)
        else:
            chosen = np.sort(rng.choice(len(pool), size=budget, replace=False))
        kept.extend(pool[i] for i in chosen)
        taken[language_pair_name(key)] = len(chosen)
    if shortfalls:
        logger.warning("%d language pairs fall short of their budget", len(shortfalls))
    report = QuotaReport(target=sum(plan.values()), total=len(kept), quotas=taken, shortfalls=shortfalls)
    return kept, report
