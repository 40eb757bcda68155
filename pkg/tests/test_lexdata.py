"""Tests for synset loading, constraint mining and constraint files"""

import pytest
from pydantic import ValidationError

from lexdata.constraints_io import HEADER, read_constraints, write_constraints
from lexdata.mining import constraint_stats, mine_constraints, select_seed_words, synset_constraints
from lexdata.models import ConstraintPair, FrequencyList, dict_to_synset, synset_to_dict
from lexdata.resources import (
    collect_exclusions,
    load_exclusions,
    load_frequency_list,
    load_frequency_lists,
    load_synset_dump,
)
from schemas import MiningConfig
from tests.conftest import PRODUCTION_SYNSET, write_dump
from utils.errors import ArtifactIOError, DataValidationError


# ============================================================================
# LOADING
# ============================================================================

def test_load_production_synset(tmp_path):
    records = load_synset_dump(write_dump(tmp_path / "d.jsonl", [PRODUCTION_SYNSET]))
    assert len(records) == 1
    assert records[0].synset_id == "bn:00064584n"
    assert [l.text for l in records[0].lemmas] == ["production", "produit"]


def test_empty_dump_gives_no_records(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert load_synset_dump(path) == []


def test_duplicate_synset_id_is_named(tmp_path):
    path = write_dump(tmp_path / "d.jsonl", [PRODUCTION_SYNSET, PRODUCTION_SYNSET])
    with pytest.raises(DataValidationError, match="bn:00064584n"):
        load_synset_dump(path)


def test_malformed_line_reports_line_number(tmp_path):
    path = write_dump(tmp_path / "d.jsonl", [PRODUCTION_SYNSET])
    with path.open("a") as f:
        f.write("{not json\n")
    with pytest.raises(DataValidationError, match=":2:"):
        load_synset_dump(path)


def test_missing_dump_is_io_error(tmp_path):
    with pytest.raises(ArtifactIOError):
        load_synset_dump(tmp_path / "absent.jsonl")


def test_synset_dict_conversion_is_lossless():
    record = dict_to_synset(PRODUCTION_SYNSET)
    assert dict_to_synset(synset_to_dict(record)) == record


def test_bad_language_code_rejected():
    data = {**PRODUCTION_SYNSET, "lemmas": [{"lang": "EN", "text": "production"}]}
    with pytest.raises(DataValidationError):
        dict_to_synset(data)


def test_frequency_list_ranks_and_duplicates(tmp_path):
    path = tmp_path / "en.freq"
    path.write_text("the\nof\ncat\nof\n")
    freq = load_frequency_list(path, "en")
    assert freq.rank("the") == 1
    assert freq.rank("cat") == 3
    assert freq.rank("dog") == float("inf")
    with pytest.raises(DataValidationError):
        FrequencyList(lang="en", words=["a", "a"])


def test_missing_frequency_file_names_language(freq_dir):
    with pytest.raises(DataValidationError, match="it"):
        load_frequency_lists(freq_dir, ["en", "it"])


def test_load_exclusions(tmp_path):
    path = tmp_path / "ex.tsv"
    path.write_text("chat\tfr\ncat\ten\n")
    assert load_exclusions(path) == {("chat", "fr"), ("cat", "en")}
    path.write_text("chat fr\n")
    with pytest.raises(DataValidationError):
        load_exclusions(path)


# ============================================================================
# SEEDS
# ============================================================================

def test_seed_words_skip_stopwords():
    freq = FrequencyList(lang="en", words=["the", "of", "cat", "dog"])
    config = MiningConfig(languages=frozenset({"en"}), seed_count=2, stopwords=frozenset({"the", "of"}))
    assert select_seed_words(freq, config) == ["cat", "dog"]


def test_seed_words_identity():
    freq = FrequencyList(lang="en", words=["a", "b", "c"])
    assert select_seed_words(freq, MiningConfig(languages=frozenset({"en"}), seed_count=3)) == ["a", "b", "c"]


def test_seed_count_must_be_positive():
    with pytest.raises(ValidationError):
        MiningConfig(languages=frozenset({"en"}), seed_count=0)


def test_too_few_seed_words_reports_count():
    freq = FrequencyList(lang="en", words=["the", "cat"])
    config = MiningConfig(languages=frozenset({"en"}), seed_count=5, stopwords=frozenset({"the"}))
    with pytest.raises(DataValidationError, match="Only 1"):
        select_seed_words(freq, config)


# ============================================================================
# MINING
# ============================================================================

def _mine(dump_path, freq_dir, config):
    freqs = load_frequency_lists(freq_dir, ["en", "fr", "de"])
    return mine_constraints(load_synset_dump(dump_path), freqs, config)


def test_mining_finds_production_pair(dump_path, freq_dir, mining_config):
    pairs = _mine(dump_path, freq_dir, mining_config)
    production = [p for p in pairs if p.synset_id == "bn:00064584n"]
    assert len(production) == 1
    pair = production[0]
    assert (pair.w1, pair.l1, pair.w2, pair.l2) == ("production", "en", "produit", "fr")
    assert pair.gl1 not in (None, "en")
    assert pair.gl2 not in (None, "fr")


def test_mining_applies_filters(dump_path, freq_dir, mining_config):
    pairs = _mine(dump_path, freq_dir, mining_config)
    assert len(pairs) == 4
    assert all(p.synset_id != "bn:00060000n" for p in pairs)
    words = {w for p in pairs for w in (p.w1, p.w2)}
    assert "house cat" not in words
    assert "minou" not in words
    assert {(p.w1, p.w2) for p in pairs if p.synset_id == "bn:00015267n"} == {
        ("cat", "chat"), ("cat", "Katze"), ("chat", "Katze"),
    }


def test_gloss_language_differs_from_word_language(dump_path, freq_dir, mining_config):
    for pair in _mine(dump_path, freq_dir, mining_config):
        assert pair.gl1 is None or pair.gl1 != pair.l1
        assert pair.gl2 is None or pair.gl2 != pair.l2


def _cat_record(glosses):
    return dict_to_synset({
        "synset_id": "bn:00015267n",
        "is_named_entity": False,
        "lemmas": [{"lang": "en", "text": "cat"}, {"lang": "fr", "text": "chat"}],
        "glosses": [{"lang": lang, "text": text} for lang, text in glosses],
    })


def test_attached_gloss_may_come_from_outside_the_language_set(freq_dir):
    record = _cat_record([("en", "A small feline"), ("fr", "Petit felin"), ("de", "Kleine Katze")])
    config = MiningConfig(languages=frozenset({"en", "fr"}), seed_count=1, frequency_cutoff=10,
                          gloss_language_priority=("de", "en"))
    pairs = synset_constraints(record, load_frequency_lists(freq_dir, ["en", "fr"]), config)
    assert [(p.w1, p.w2) for p in pairs] == [("cat", "chat")]
    assert (pairs[0].gl1, pairs[0].g1) == ("de", "Kleine Katze")
    assert (pairs[0].gl2, pairs[0].g2) == ("de", "Kleine Katze")


def test_gloss_count_only_counts_the_language_set(freq_dir):
    record = _cat_record([("en", "A small feline"), ("de", "Kleine Katze")])
    config = MiningConfig(languages=frozenset({"en", "fr"}), seed_count=1, frequency_cutoff=10)
    assert synset_constraints(record, load_frequency_lists(freq_dir, ["en", "fr"]), config) == []


def test_exclusion_words_are_dropped(dump_path, freq_dir, mining_config):
    config = mining_config.model_copy(update={"exclusion_words": frozenset({("chat", "fr")})})
    pairs = _mine(dump_path, freq_dir, config)
    assert all("chat" not in (p.w1, p.w2) for p in pairs)
    assert len(pairs) == 2


def test_mining_fails_before_work_on_missing_language(dump_path, freq_dir):
    config = MiningConfig(languages=frozenset({"en", "it"}), seed_count=1)
    freqs = load_frequency_lists(freq_dir, ["en"])
    with pytest.raises(DataValidationError, match="it"):
        mine_constraints(load_synset_dump(dump_path), freqs, config)


def test_mining_is_deterministic(dump_path, freq_dir, mining_config, tmp_path):
    first = write_constraints(_mine(dump_path, freq_dir, mining_config), tmp_path / "a.tsv")
    second = write_constraints(_mine(dump_path, freq_dir, mining_config), tmp_path / "b.tsv")
    assert first.read_bytes() == second.read_bytes()


def test_canonical_keys_unique(dump_path, freq_dir, mining_config):
    pairs = _mine(dump_path, freq_dir, mining_config)
    keys = [p.canonical_key() for p in pairs]
    assert len(keys) == len(set(keys))


def test_constraint_stats_sum_to_total(dump_path, freq_dir, mining_config):
    pairs = _mine(dump_path, freq_dir, mining_config)
    stats = constraint_stats(pairs)
    assert stats.total == len(pairs)
    assert sum(stats.pair_counts.values()) == len(pairs)
    assert stats.pair_counts["en-fr"] == 2


def test_collect_exclusions_uses_dataset_words():
    class Dataset:
        def exclusion_words(self):
            return {("cat", "en")}

    assert collect_exclusions([Dataset(), Dataset()]) == {("cat", "en")}


# ============================================================================
# CONSTRAINT MODEL AND FILES
# ============================================================================

def test_self_pair_rejected():
    with pytest.raises(DataValidationError):
        ConstraintPair(w1="cat", l1="en", w2="cat", l2="en", synset_id="s")


def test_same_word_other_language_allowed():
    pair = ConstraintPair(w1="taxi", l1="en", w2="taxi", l2="fr", synset_id="s")
    assert pair.language_pair == ("en", "fr")


def test_gloss_in_word_language_rejected():
    with pytest.raises(DataValidationError):
        ConstraintPair(w1="cat", l1="en", w2="chat", l2="fr", synset_id="s", g1="feline", gl1="en")


def test_whitespace_word_rejected():
    with pytest.raises(DataValidationError):
        ConstraintPair(w1="house cat", l1="en", w2="chat", l2="fr", synset_id="s")


def test_empty_constraint_file_is_header_only(tmp_path):
    path = write_constraints([], tmp_path / "c.tsv")
    assert path.read_text() == HEADER + "\n"
    assert read_constraints(path) == []


def test_constraint_file_round_trip(tmp_path, toy_constraints):
    path = write_constraints(toy_constraints, tmp_path / "c.tsv")
    assert read_constraints(path) == toy_constraints
    assert len(path.read_text().splitlines()[1].split("\t")) == 9


def test_tab_in_gloss_is_write_error(tmp_path):
    pair = ConstraintPair(w1="cat", l1="en", w2="chat", l2="fr", synset_id="s", g1="a\tb", gl1="de")
    with pytest.raises(DataValidationError):
        write_constraints([pair], tmp_path / "c.tsv")


def test_column_count_mismatch_on_read(tmp_path):
    path = tmp_path / "c.tsv"
    path.write_text(HEADER + "\ncat\ten\tchat\n")
    with pytest.raises(DataValidationError, match=":2:"):
        read_constraints(path)
