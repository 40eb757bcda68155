"""Tests for evaluation datasets, metrics, tasks and layer sweeps"""

import numpy as np
import pytest
from pydantic import ValidationError

from encoder.model import init_model
from encoder.tokenizer import SubwordVocabulary
from evalsuite.datasets import (
    BliDataset,
    RetrievalDataset,
    XlsimDataset,
    language_pair_from_name,
    load_bli_dataset,
    load_retrieval_dataset,
    load_xlsim_dataset,
)
from evalsuite.metrics import (
    brute_force_accuracy,
    brute_force_mrr,
    cosine_matrix,
    mrr_from_ranks,
    mrr_from_scores,
    nearest_neighbour_accuracy,
    rank_of,
    rank_pearson,
    spearman,
)
from evalsuite.reports import rank_pair_improvements
from evalsuite.tasks import (
    best_layer,
    bli_mrr,
    build_report,
    embed_words,
    evaluate_layer,
    layer_sweep,
    sentence_retrieval_accuracy,
    xlsim_spearman,
)
from schemas import EncoderConfig, EvalReport
from utils.errors import ArtifactIOError, DataValidationError


def _controlled_model(vectors):
    """Zero-layer model whose word vectors are exactly the given rows."""
    words = list(vectors)
    dim = len(next(iter(vectors.values())))
    model = init_model(EncoderConfig(dim=dim, num_layers=0, ffn_dim=4, max_sequence_length=8),
                       SubwordVocabulary(words))
    table = model.params["embeddings"].data
    for word, vec in vectors.items():
        table[model.vocab.token_to_id[word]] = vec
    return model


# ============================================================================
# METRICS
# ============================================================================

def test_hand_mrr():
    assert mrr_from_ranks([1, 2, 4]) == pytest.approx(0.58333, abs=1e-5)
    scores = np.array([
        [0.9, 0.1, 0.2, 0.3],
        [0.5, 0.9, 0.1, 0.0],
        [0.4, 0.3, 0.2, 0.1],
    ])
    assert mrr_from_scores(scores, [[0], [0], [3]]) == mrr_from_ranks([1, 2, 4])


def test_perfect_mrr():
    assert mrr_from_scores(np.eye(3), [[0], [1], [2]]) == 1.0


def test_ties_go_to_earlier_candidates():
    scores = np.array([0.5, 0.7, 0.5, 0.5])
    assert rank_of(scores, 1) == 1
    assert rank_of(scores, 0) == 2
    assert rank_of(scores, 3) == 4


def test_multi_gold_scores_best_gold():
    scores = np.array([[0.1, 0.9, 0.5]])
    assert mrr_from_scores(scores, [[0, 2]]) == 0.5


def test_mrr_shape_errors():
    with pytest.raises(DataValidationError):
        mrr_from_scores(np.zeros((0, 3)), [])
    with pytest.raises(DataValidationError):
        mrr_from_scores(np.zeros((2, 3)), [[0]])


def test_spearman_hand_values():
    assert spearman([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5, abs=1e-12)
    assert spearman([0.1, 0.5, 0.7, 2.0], [1.0, 8.0, 9.0, 100.0]) == pytest.approx(1.0)
    assert spearman([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1.0)


def test_spearman_undefined_for_constant_scores():
    assert spearman([1, 1, 1], [1, 2, 3]) is None
    assert spearman([1, 2, 3], [0.5, 0.5, 0.5]) is None
    with pytest.raises(DataValidationError):
        spearman([1.0], [2.0])


@pytest.mark.parametrize("human, model", [
    ([1, 2, 2, 3, 5], [0.1, 0.4, 0.2, 0.2, 0.9]),
    ([3, 3, 3, 1, 2, 2], [1, 2, 3, 4, 5, 6]),
    ([0.5, 0.1, 0.9, 0.3], [10, 30, 20, 40]),
])
def test_spearman_matches_rank_pearson(human, model):
    assert spearman(human, model) == pytest.approx(rank_pearson(human, model), abs=1e-12)


def test_metrics_match_brute_force_references():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n_candidates = int(rng.integers(2, 101))
        n_queries = int(rng.integers(1, 11))
        dim = int(rng.integers(2, 6))
        candidates = rng.normal(size=(n_candidates, dim))
        # Duplicate rows create exact score ties.
        for i in rng.choice(n_candidates, size=n_candidates // 5, replace=False):
            candidates[i] = candidates[int(rng.integers(n_candidates))]
        queries = rng.normal(size=(n_queries, dim))
        golds = [list(rng.choice(n_candidates, size=int(rng.integers(1, 3)), replace=False))
                 for _ in range(n_queries)]
        assert mrr_from_scores(cosine_matrix(queries, candidates), golds) == brute_force_mrr(queries, candidates, golds)

        square = candidates[:min(n_candidates, 20)]
        probes = square + rng.normal(scale=0.5, size=square.shape)
        assert nearest_neighbour_accuracy(cosine_matrix(probes, square)) == brute_force_accuracy(probes, square)


def test_scores_are_scale_invariant():
    rng = np.random.default_rng(1)
    queries, candidates = rng.normal(size=(6, 4)), rng.normal(size=(30, 4))
    golds = [[i] for i in range(6)]
    base = mrr_from_scores(cosine_matrix(queries, candidates), golds)
    scaled = mrr_from_scores(cosine_matrix(queries * 7.5, candidates * 7.5), golds)
    assert scaled == pytest.approx(base, abs=1e-12)


def test_duplicate_distractor_never_helps():
    rng = np.random.default_rng(2)
    for _ in range(20):
        queries, candidates = rng.normal(size=(5, 3)), rng.normal(size=(12, 3))
        golds = [[int(g)] for g in rng.integers(0, 12, size=5)]
        base = mrr_from_scores(cosine_matrix(queries, candidates), golds)
        non_gold = next(i for i in range(12) if all([i] != g for g in golds))
        extended = np.vstack([candidates, candidates[non_gold]])
        assert mrr_from_scores(cosine_matrix(queries, extended), golds) <= base


def test_retrieval_tie_and_single_pair():
    assert nearest_neighbour_accuracy(np.ones((4, 4))) == 0.25
    assert nearest_neighbour_accuracy(np.array([[0.3]])) == 1.0
    with pytest.raises(DataValidationError):
        nearest_neighbour_accuracy(np.ones((2, 3)))


# ============================================================================
# DATASETS
# ============================================================================

def test_gold_outside_vocabulary_rejected():
    with pytest.raises(DataValidationError, match="chien"):
        BliDataset(src="en", tgt="fr", queries=[("dog", ["chien"])], vocabulary=["chat"])


def test_repeated_source_rejected():
    with pytest.raises(DataValidationError):
        BliDataset(src="en", tgt="fr", queries=[("cat", ["chat"]), ("cat", ["minou"])],
                   vocabulary=["chat", "minou"])


def test_load_bli_dataset_groups_golds(tmp_path):
    pairs = tmp_path / "en-fr.tsv"
    pairs.write_text("cat\tchat\ncat\tminou\ndog\tchien\n")
    vocab = tmp_path / "en-fr.vocab"
    vocab.write_text("chat\nchien\nminou\nchat\n")
    ds = load_bli_dataset(pairs, vocab)
    assert (ds.src, ds.tgt, ds.dataset_id) == ("en", "fr", "en-fr")
    assert ds.queries == [("cat", ["chat", "minou"]), ("dog", ["chien"])]
    assert ds.vocabulary == ["chat", "chien", "minou"]
    assert ds.gold_indices() == [[0, 2], [1]]
    assert ("cat", "en") in ds.exclusion_words() and ("minou", "fr") in ds.exclusion_words()


def test_bli_loader_errors(tmp_path):
    pairs = tmp_path / "bli.tsv"
    pairs.write_text("cat\tchat\n")
    vocab = tmp_path / "v.txt"
    vocab.write_text("chat\n")
    with pytest.raises(DataValidationError, match="language pair"):
        load_bli_dataset(pairs, vocab)
    bad = tmp_path / "en-fr.tsv"
    bad.write_text("cat\tchat\ndog\n")
    with pytest.raises(DataValidationError, match=":2:"):
        load_bli_dataset(bad, vocab)
    with pytest.raises(ArtifactIOError):
        load_bli_dataset(tmp_path / "de-en.tsv", vocab)


def test_language_pair_from_name():
    assert language_pair_from_name("data/en-fr.tsv") == ("en", "fr")
    assert language_pair_from_name("de_it.tsv") == ("de", "it")
    assert language_pair_from_name("test.tsv") is None


def test_load_xlsim_dataset(tmp_path):
    path = tmp_path / "en-de.tsv"
    path.write_text("cat\tKatze\t5.5\ndog\tHaus\t0.5\n")
    ds = load_xlsim_dataset(path)
    assert ds.entries == [("cat", "Katze", 5.5), ("dog", "Haus", 0.5)]
    path.write_text("cat\tKatze\tnan\ndog\tHaus\t0.5\n")
    with pytest.raises(DataValidationError):
        load_xlsim_dataset(path)
    with pytest.raises(DataValidationError):
        XlsimDataset(l1="en", l2="de", entries=[("cat", "Katze", 1.0)])


def test_load_retrieval_dataset(tmp_path):
    path = tmp_path / "tatoeba.tsv"
    path.write_text("le chat\tthe cat\nle chien\tthe dog\n")
    ds = load_retrieval_dataset(path)
    assert len(ds) == 2 and ds.dataset_id == "tatoeba"
    with pytest.raises(DataValidationError):
        RetrievalDataset(pairs=[])
    assert len(RetrievalDataset(pairs=[("le chat", "the cat")])) == 1


# ============================================================================
# TASKS
# ============================================================================

ORTHO = {
    "aa": [1.0, 0.0, 0.0], "ab": [0.0, 1.0, 0.0], "ac": [0.0, 0.0, 1.0],
    "ba": [0.9, 0.1, 0.0], "bb": [0.1, 0.9, 0.0], "bc": [0.0, 0.1, 0.9],
}


def test_bli_perfect_alignment():
    model = _controlled_model(ORTHO)
    ds = BliDataset(src="xa", tgt="xb", queries=[("aa", ["ba"]), ("ab", ["bb"]), ("ac", ["bc"])],
                    vocabulary=["ba", "bb", "bc"])
    assert bli_mrr(model, 0, ds) == 1.0


def test_bli_hand_ranks():
    model = _controlled_model(ORTHO)
    ds = BliDataset(src="xa", tgt="xb", queries=[("aa", ["bb"])], vocabulary=["ba", "bb", "bc"])
    assert bli_mrr(model, 0, ds) == 0.5


def test_bli_layer_out_of_range(tiny_model):
    ds = BliDataset(src="en", tgt="fr", queries=[("cat", ["chat"])], vocabulary=["chat"])
    with pytest.raises(DataValidationError):
        bli_mrr(tiny_model, 3, ds)


def test_retrieval_orthogonal_fixture():
    model = _controlled_model(ORTHO)
    ds = RetrievalDataset(pairs=[("aa", "ba"), ("ab", "bb"), ("ac bc", "bc")])
    assert sentence_retrieval_accuracy(model, 0, ds) == 1.0


def test_retrieval_identical_candidates():
    model = _controlled_model({"aa": [1.0, 0.0], "ab": [0.0, 1.0], "ac": [1.0, 1.0], "zz": [2.0, 2.0]})
    ds = RetrievalDataset(pairs=[("aa", "zz"), ("ab", "zz"), ("ac", "zz")])
    assert sentence_retrieval_accuracy(model, 0, ds) == pytest.approx(1 / 3)


def test_xlsim_monotone_and_constant():
    model = _controlled_model({
        "aa": [1.0, 0.0], "ab": [1.0, 0.2], "ac": [1.0, 1.0], "ad": [0.0, 1.0],
    })
    ds = XlsimDataset(l1="xa", l2="xb", entries=[("aa", "ab", 9.0), ("aa", "ac", 5.0), ("aa", "ad", 1.0)])
    assert xlsim_spearman(model, 0, ds) == pytest.approx(1.0)
    flat = XlsimDataset(l1="xa", l2="xb", entries=[("aa", "ab", 2.0), ("aa", "ac", 2.0)])
    assert xlsim_spearman(model, 0, flat) is None


def test_embedding_is_scale_invariant_at_layer_zero():
    model = _controlled_model(ORTHO)
    ds = BliDataset(src="xa", tgt="xb", queries=[("aa", ["bb"]), ("ac", ["bc"])], vocabulary=["ba", "bb", "bc"])
    base = bli_mrr(model, 0, ds)
    model.params["embeddings"].data[...] *= 3.0
    assert bli_mrr(model, 0, ds) == pytest.approx(base, abs=1e-12)


def test_embed_words_shape(tiny_model):
    arr = embed_words(tiny_model, ["cat", "chat", "cat"])
    assert arr.shape == (3, 3, 8)
    np.testing.assert_array_equal(arr[:, 0], arr[:, 2])


# ============================================================================
# LAYER SWEEPS AND REPORTS
# ============================================================================

def test_best_layer_tie_rule():
    assert best_layer([0.1, 0.3, 0.3]) == 1
    assert best_layer([None, 0.2, None]) == 1
    assert best_layer([None, None]) is None


def test_report_best_score_is_max():
    report = build_report("bli", "en-fr", [0.1, 0.4, 0.2], "abc")
    assert (report.best_layer, report.best_score) == (1, 0.4)
    with pytest.raises(ValidationError):
        EvalReport(task="bli", dataset_id="x", layer_scores=[0.1, 0.4], best_layer=0, best_score=0.1,
                   checkpoint_id="")


def test_zero_layer_sweep_has_one_layer():
    model = _controlled_model(ORTHO)
    ds = BliDataset(src="xa", tgt="xb", queries=[("aa", ["ba"])], vocabulary=["ba", "bb"])
    report = layer_sweep(model, ds, "bli")
    assert report.layer_scores == [1.0]
    assert report.best_layer == 0


def test_sweep_agrees_with_single_layers(tiny_model):
    ds = BliDataset(src="en", tgt="fr", queries=[("cat", ["chat"]), ("dog", ["chien"]), ("house", ["maison"])],
                    vocabulary=["chat", "chien", "maison", "le", "un"])
    report = layer_sweep(tiny_model, ds, "bli", checkpoint_id="ck")
    assert len(report.layer_scores) == tiny_model.num_layers + 1
    for layer, score in enumerate(report.layer_scores):
        assert score == pytest.approx(bli_mrr(tiny_model, layer, ds), abs=1e-12)
    assert report.best_score == max(report.layer_scores)
    assert report.checkpoint_id == "ck"


def test_evaluate_layer_leaves_other_layers_undefined(tiny_model):
    ds = RetrievalDataset(pairs=[("le chat", "the cat"), ("un chien", "a dog")])
    report = evaluate_layer(tiny_model, ds, "retrieval", 1)
    assert report.layer_scores[0] is None and report.layer_scores[2] is None
    assert report.best_layer == 1


def test_sweep_input_errors(tiny_model):
    ds = RetrievalDataset(pairs=[("le chat", "the cat")])
    with pytest.raises(DataValidationError):
        layer_sweep(tiny_model, ds, "bli")
    with pytest.raises(DataValidationError):
        layer_sweep(tiny_model, ds, "csls")


def _report(dataset_id, score, task="bli"):
    return build_report(task, dataset_id, [score], "")


def test_rank_pair_improvements():
    baseline = [_report("en-fr", 0.25), _report("en-de", 0.5), _report("de-fr", 0.125), _report("it-fr", 0.5)]
    tuned = [_report("en-fr", 0.5), _report("en-de", 0.75), _report("de-fr", 0.625), _report("it-fr", 0.375)]
    ranked = rank_pair_improvements(baseline, tuned)
    assert ranked == [("de-fr", 0.5), ("en-de", 0.25), ("en-fr", 0.25), ("it-fr", -0.125)]
    assert len(rank_pair_improvements(baseline, tuned, top_k=1)) == 1
    with pytest.raises(DataValidationError):
        rank_pair_improvements(baseline[:1], tuned)
