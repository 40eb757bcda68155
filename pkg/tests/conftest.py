"""Shared fixtures: an appendix-style synset dump, frequency lists and tiny models."""

from pathlib import Path

import orjson
import pytest

from encoder.model import init_model
from encoder.tokenizer import SubwordVocabulary
from lexdata.models import ConstraintPair
from schemas import EncoderConfig, MiningConfig

PRODUCTION_SYNSET = {
    "synset_id": "bn:00064584n",
    "is_named_entity": False,
    "lemmas": [
        {"lang": "en", "text": "production", "is_auto_translation": False, "is_redirection": False},
        {"lang": "fr", "text": "produit", "is_auto_translation": False, "is_redirection": False},
    ],
    "glosses": [
        {"lang": "en", "text": "The act of producing something"},
        {"lang": "fr", "text": "Action de produire quelque chose"},
        {"lang": "de", "text": "Das Herstellen von etwas"},
    ],
}

NAMED_ENTITY_SYNSET = {
    "synset_id": "bn:00060000n",
    "is_named_entity": True,
    "lemmas": [
        {"lang": "en", "text": "paris"},
        {"lang": "fr", "text": "paris"},
    ],
    "glosses": [
        {"lang": "en", "text": "The capital of France"},
        {"lang": "fr", "text": "Capitale de la France"},
    ],
}

CAT_SYNSET = {
    "synset_id": "bn:00015267n",
    "is_named_entity": False,
    "lemmas": [
        {"lang": "en", "text": "cat"},
        {"lang": "en", "text": "house cat"},
        {"lang": "fr", "text": "chat"},
        {"lang": "fr", "text": "minou", "is_auto_translation": True},
        {"lang": "de", "text": "Katze"},
    ],
    "glosses": [
        {"lang": "en", "text": "A small domesticated feline"},
        {"lang": "fr", "text": "Petit felin domestique"},
    ],
}

FREQUENCY_LISTS = {
    "en": ["the", "of", "production", "cat", "paris", "house", "dog"],
    "fr": ["le", "produit", "chat", "paris", "minou"],
    "de": ["die", "Katze"],
}


def write_dump(path: Path, records) -> Path:
    path.write_bytes(b"".join(orjson.dumps(r) + b"\n" for r in records))
    return path


def write_freq_dir(directory: Path, lists=FREQUENCY_LISTS) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    for lang, words in lists.items():
        (directory / f"{lang}.freq").write_text("\n".join(words) + "\n", encoding="utf-8")
    return directory


@pytest.fixture
def dump_records():
    return [PRODUCTION_SYNSET, NAMED_ENTITY_SYNSET, CAT_SYNSET]


@pytest.fixture
def dump_path(tmp_path, dump_records):
    return write_dump(tmp_path / "dump.jsonl", dump_records)


@pytest.fixture
def freq_dir(tmp_path):
    return write_freq_dir(tmp_path / "freq")


@pytest.fixture
def mining_config():
    return MiningConfig(
        languages=frozenset({"en", "fr", "de"}),
        seed_count=3,
        frequency_cutoff=10,
        stopwords=frozenset({"the", "of"}),
    )


@pytest.fixture
def tiny_vocab():
    return SubwordVocabulary([
        "cat", "chat", "dog", "chien", "house", "maison", "the", "a", "small", "animal",
        "pro", "##duct", "##ion", "##uit", "##s", "un", "le",
    ])


@pytest.fixture
def tiny_config():
    return EncoderConfig(dim=8, num_layers=2, ffn_dim=12, max_sequence_length=16)


@pytest.fixture
def tiny_model(tiny_config, tiny_vocab):
    return init_model(tiny_config, tiny_vocab, seed=3)


@pytest.fixture
def tiny_adapter_model(tiny_config, tiny_vocab):
    config = EncoderConfig(**{**tiny_config.model_dump(), "mode": "adapter", "adapter_bottleneck": 2})
    return init_model(config, tiny_vocab, seed=3)


@pytest.fixture
def toy_constraints():
    return [
        ConstraintPair(w1="cat", l1="en", w2="chat", l2="fr", synset_id="s:cat",
                       g1="un animal", gl1="fr", g2="a small animal", gl2="en"),
        ConstraintPair(w1="dog", l1="en", w2="chien", l2="fr", synset_id="s:dog"),
        ConstraintPair(w1="house", l1="en", w2="maison", l2="fr", synset_id="s:house"),
        ConstraintPair(w1="cat", l1="en", w2="chats", l2="fr", synset_id="s:cat"),
        ConstraintPair(w1="dog", l1="en", w2="dogs", l2="en", synset_id="s:dog"),
    ]
