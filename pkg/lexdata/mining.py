"""
Constraint Mining

Turns a synset dump into synonym (and synonym-gloss) pairs: seed words,
named-entity / gloss-count / frequency / multiword / exclusion filters,
all monolingual and cross-lingual pairs per synset, gloss attachment and
deduplication.
"""

import logging
from collections import Counter
from typing import Dict, List, Mapping, Optional, Sequence, Set

from lexdata.models import (
    ConstraintPair,
    FrequencyList,
    Gloss,
    Lemma,
    SynsetRecord,
    language_pair_name,
)
from schemas import MiningConfig, MiningStats
from utils.errors import DataValidationError
from utils.validators import contains_whitespace

logger = logging.getLogger(__name__)

MIN_GLOSSES = 2


def select_seed_words(freq_en: FrequencyList, config: MiningConfig) -> List[str]:
    """
    Pick the top-N non-stopword words of the English frequency list.

    Args:
        freq_en: English frequency list
        config: Mining configuration (seed_count, stopwords)

    Returns:
        Ordered list of N seed words

    Raises:
        DataValidationError: If fewer than N non-stopword words are available
    """
    seeds = []
    for word in freq_en.words:
        if word in config.stopwords:
            continue
        seeds.append(word)
        if len(seeds) == config.seed_count:
            return seeds

    raise DataValidationError(
        f"Only {len(seeds)} non-stopword entries in the '{freq_en.lang}' frequency list; "
        f"{config.seed_count} seed words requested"
    )


def _pick_gloss(glosses: Sequence[Gloss], word_lang: str, priority: Sequence[str]) -> Optional[Gloss]:
    # Priority languages first, then dump order; never the word's own language.
    for lang in priority:
        if lang == word_lang:
            continue
        for gloss in glosses:
            if gloss.lang == lang:
                return gloss
    for gloss in glosses:
        if gloss.lang != word_lang:
            return gloss
    return None


def _is_candidate(
    lemma: Lemma,
    languages: Set[str],
    freqs: Mapping[str, FrequencyList],
    config: MiningConfig,
) -> bool:
    if lemma.lang not in languages:
        return False
    if lemma.is_auto_translation or lemma.is_redirection:
        return False
    if contains_whitespace(lemma.text):
        return False
    if (lemma.text, lemma.lang) in config.exclusion_words:
        return False
    return freqs[lemma.lang].rank(lemma.text) <= config.frequency_cutoff


def synset_constraints(
    record: SynsetRecord,
    freqs: Mapping[str, FrequencyList],
    config: MiningConfig,
) -> List[ConstraintPair]:
    """
    All constraint pairs contributed by a single synset (before global dedup).

    Returns an empty list for named entities and for synsets with fewer than
    two glosses in the configured languages.
    """
    languages = set(config.languages)
    if record.is_named_entity:
        return []

    if sum(1 for g in record.glosses if g.lang in languages and g.text) < MIN_GLOSSES:
        return []
    # Attached glosses may come from any language, not only the configured ones.
    glosses = [g for g in record.glosses if g.text]

    candidates = [lemma for lemma in record.lemmas if _is_candidate(lemma, languages, freqs, config)]
    priority = config.gloss_language_priority

    pairs = []
    for i, first in enumerate(candidates):
        for second in candidates[i + 1:]:
            if first.text == second.text and first.lang == second.lang:
                continue
            gloss1 = _pick_gloss(glosses, first.lang, priority)
            gloss2 = _pick_gloss(glosses, second.lang, priority)
            pairs.append(ConstraintPair(
                w1=first.text,
                l1=first.lang,
                w2=second.text,
                l2=second.lang,
                synset_id=record.synset_id,
                g1=gloss1.text if gloss1 else None,
                gl1=gloss1.lang if gloss1 else None,
                g2=gloss2.text if gloss2 else None,
                gl2=gloss2.lang if gloss2 else None,
            ))
    return pairs


def mine_constraints(
    dump: Sequence[SynsetRecord],
    freqs: Mapping[str, FrequencyList],
    config: MiningConfig,
    seed_words: Optional[Sequence[str]] = None,
) -> List[ConstraintPair]:
    """
    Mine synonym constraints from a synset dump.

    A synset is visited when any of its lemmas in a configured language
    matches a seed word. Output order is dump order, then lemma order.

    Args:
        dump: Synset records
        freqs: Frequency list per language
        config: Mining configuration
        seed_words: Seeds; selected from the English frequency list when omitted

    Returns:
        Deduplicated list of ConstraintPair models

    Raises:
        DataValidationError: If a configured language has no frequency list
    """
    missing = sorted(lang for lang in config.languages if lang not in freqs)
    if missing:
        raise DataValidationError(f"No frequency list for language(s): {', '.join(missing)}")

    if seed_words is None:
        if "en" not in freqs:
            raise DataValidationError("Seed selection needs an English ('en') frequency list")
        seed_words = select_seed_words(freqs["en"], config)
    seeds = set(seed_words)

    languages = set(config.languages)
    pairs: List[ConstraintPair] = []
    seen_keys = set()
    visited = 0
    filtered = Counter()

    for record in dump:
        if not any(l.lang in languages and l.text in seeds for l in record.lemmas):
            continue
        visited += 1
        if record.is_named_entity:
            filtered["named_entity"] += 1
            continue

        for pair in synset_constraints(record, freqs, config):
            key = pair.canonical_key()
            if key in seen_keys:
                filtered["duplicate"] += 1
                continue
            seen_keys.add(key)
            pairs.append(pair)

    logger.info(
        "Mined %d constraints from %d seed-matched synsets (%s)",
        len(pairs), visited, dict(filtered) or "no drops",
    )
    return pairs


def constraint_stats(pairs: Sequence[ConstraintPair]) -> MiningStats:
    """Count constraints per canonical language pair."""
    counts: Dict[str, int] = Counter(language_pair_name(p.language_pair) for p in pairs)
    languages = sorted({p.l1 for p in pairs} | {p.l2 for p in pairs})
    return MiningStats(
        total=len(pairs),
        pair_counts=dict(sorted(counts.items())),
        languages=languages,
    )
