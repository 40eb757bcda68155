"""End-to-end tests of the command line through typer's CliRunner"""

import os

import pytest
from typer.testing import CliRunner

from cli import app, resolve_config
from lexdata.constraints_io import read_constraints, write_constraints
from lexdata.models import ConstraintPair
from utils.errors import ArtifactIOError, DataValidationError
from utils.reports import read_json

runner = CliRunner()

SMALL_MODEL = ["--set", "dim=16", "--set", "num_layers=2", "--set", "ffn_dim=32"]


def _invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in list(os.environ):
        if name.startswith("LEXSPEC_") and name != "LEXSPEC_LOG_LEVEL":
            monkeypatch.delenv(name)


# ============================================================================
# CONFIG RESOLUTION
# ============================================================================

def test_flags_override_file_and_environment(tmp_path, monkeypatch):
    config_file = tmp_path / "run.cfg"
    config_file.write_text("lr=0.5\nepochs=3\ntau=0.2\n", encoding="utf-8")
    monkeypatch.setenv("LEXSPEC_EPOCHS", "4")
    cfg = resolve_config(config_file, ["tau=0.3"], lr=0.25)
    assert cfg.lr == 0.25
    assert cfg.epochs == 4
    assert cfg.tau == 0.3


def test_optimizer_settings_reach_adamw(monkeypatch):
    monkeypatch.setenv("LEXSPEC_BETA2", "0.99")
    adamw = resolve_config(None, ["beta1=0.8", "eps=1e-6", "weight_decay=0.01"]).train_config().adamw_config()
    assert (adamw.beta1, adamw.beta2, adamw.eps, adamw.weight_decay) == (0.8, 0.99, 1e-6, 0.01)


def test_unknown_config_key_rejected(tmp_path):
    config_file = tmp_path / "run.cfg"
    config_file.write_text("learning_speed=3\n", encoding="utf-8")
    with pytest.raises(DataValidationError, match="learning_speed"):
        resolve_config(config_file)


def test_missing_config_file(tmp_path):
    with pytest.raises(ArtifactIOError):
        resolve_config(tmp_path / "absent.cfg")


def test_malformed_override():
    with pytest.raises(DataValidationError):
        resolve_config(None, ["epochs"])


# ============================================================================
# MINE
# ============================================================================

def _mine(dump_path, freq_dir, out, languages="en,fr,de"):
    stopwords = dump_path.parent / "stop.txt"
    stopwords.write_text("the\nof\n", encoding="utf-8")
    return _invoke(
        "mine", "--dump", dump_path, "--freq-dir", freq_dir, "--languages", languages,
        "--seed-count", 3, "--frequency-cutoff", 10, "--stopwords", stopwords, "--out", out,
    )


def test_mine_is_deterministic_and_counts_match(dump_path, freq_dir, tmp_path):
    first = _mine(dump_path, freq_dir, tmp_path / "run1")
    second = _mine(dump_path, freq_dir, tmp_path / "run2")
    assert first.exit_code == 0, first.output
    assert second.exit_code == 0, second.output

    tsv = (tmp_path / "run1" / "constraints.tsv").read_bytes()
    assert tsv == (tmp_path / "run2" / "constraints.tsv").read_bytes()

    stats = read_json(tmp_path / "run1" / "stats.json")
    rows = len(read_constraints(tmp_path / "run1" / "constraints.tsv"))
    assert rows > 0
    assert stats["total"] == rows
    assert sum(stats["pair_counts"].values()) == rows
    assert (tmp_path / "run1" / "resolved_config.json").is_file()


def test_mine_missing_frequency_list_exits_2(dump_path, freq_dir, tmp_path):
    result = _mine(dump_path, freq_dir, tmp_path / "out", languages="en,fr,it")
    assert result.exit_code == 2
    assert "language(s): it" in result.output


def test_mine_missing_dump_exits_1(freq_dir, tmp_path):
    result = _mine(tmp_path / "absent.jsonl", freq_dir, tmp_path / "out")
    assert result.exit_code == 1


def test_mine_requires_inputs(tmp_path):
    result = _invoke("mine", "--out", tmp_path)
    assert result.exit_code == 2
    assert "dump" in result.output


# ============================================================================
# TRAIN / EVAL
# ============================================================================

@pytest.fixture
def bench_dir(tmp_path):
    out = tmp_path / "bench"
    result = _invoke("synth", "--out", out, "--seed", 1, *SMALL_MODEL)
    assert result.exit_code == 0, result.output
    return out


def _train(bench_dir, out, *extra):
    return _invoke(
        "train", "--constraints", bench_dir / "constraints.tsv", "--vocab", bench_dir / "vocab.txt",
        "--word-vectors", bench_dir / "vectors.txt", "--valid-dir", bench_dir / "valid",
        "--epochs", 1, "--batch-size", 16, "--lr", 0.005, "--seed", 2, "--out", out,
        *SMALL_MODEL, *extra,
    )


def test_synth_writes_benchmark(bench_dir):
    for name in ("vocab.txt", "vectors.txt", "constraints.tsv", "valid/xa-xb.tsv", "test/xa-xb.vocab"):
        assert (bench_dir / name).is_file()


def test_train_zero_epochs_exits_2(bench_dir, tmp_path):
    result = _train(bench_dir, tmp_path / "run", "--epochs", 0)
    assert result.exit_code == 2
    assert not (tmp_path / "run" / "best_checkpoint").exists()


def test_train_unknown_setting_exits_2(bench_dir, tmp_path):
    result = _train(bench_dir, tmp_path / "run", "--set", "momentum=0.9")
    assert result.exit_code == 2
    assert "momentum" in result.output


def test_train_then_sweep(bench_dir, tmp_path):
    run = tmp_path / "run"
    result = _train(bench_dir, run)
    assert result.exit_code == 0, result.output
    assert (run / "best_checkpoint").is_dir()
    assert (run / "vanilla_checkpoint").is_dir()

    summary = read_json(run / "training_summary.json")
    assert summary["best_metric"] >= 0.0
    assert summary["steps"] > 0

    result = _invoke(
        "eval-bli", "--model-in", run / "best_checkpoint",
        "--dataset", bench_dir / "test" / "xa-xb.tsv",
        "--dataset-vocab", bench_dir / "test" / "xa-xb.vocab",
        "--out", tmp_path / "eval",
    )
    assert result.exit_code == 0, result.output
    report = read_json(tmp_path / "eval" / "eval_bli_xa-xb.json")
    assert report["task"] == "bli"
    assert len(report["layer_scores"]) == 3
    assert report["best_score"] == max(report["layer_scores"])
    assert report["layer_scores"][report["best_layer"]] == report["best_score"]


def test_train_is_reproducible(bench_dir, tmp_path):
    assert _train(bench_dir, tmp_path / "a").exit_code == 0
    assert _train(bench_dir, tmp_path / "b").exit_code == 0
    log_a = (tmp_path / "a" / "training_log.jsonl").read_bytes()
    assert log_a == (tmp_path / "b" / "training_log.jsonl").read_bytes()
    assert read_json(tmp_path / "a" / "training_summary.json") == read_json(tmp_path / "b" / "training_summary.json")


def test_single_layer_evaluation(bench_dir, tmp_path):
    run = tmp_path / "run"
    assert _train(bench_dir, run).exit_code == 0
    result = _invoke(
        "eval-bli", "--model-in", run / "vanilla_checkpoint",
        "--dataset", bench_dir / "test" / "xa-xb.tsv",
        "--dataset-vocab", bench_dir / "test" / "xa-xb.vocab",
        "--layer", 1, "--out", tmp_path / "eval",
    )
    assert result.exit_code == 0, result.output
    report = read_json(tmp_path / "eval" / "eval_bli_xa-xb.json")
    assert report["best_layer"] == 1
    assert report["layer_scores"][0] is None


def test_eval_gold_outside_vocabulary_exits_2(bench_dir, tmp_path):
    run = tmp_path / "run"
    assert _train(bench_dir, run).exit_code == 0
    pairs = tmp_path / "xa-xb.tsv"
    pairs.write_text("kaka\tnotaword\n", encoding="utf-8")
    result = _invoke(
        "eval-bli", "--model-in", run / "best_checkpoint", "--dataset", pairs,
        "--dataset-vocab", bench_dir / "test" / "xa-xb.vocab", "--out", tmp_path / "eval",
    )
    assert result.exit_code == 2


# ============================================================================
# ANALYZE
# ============================================================================

@pytest.fixture
def features_csv(tmp_path):
    path = tmp_path / "features.csv"
    path.write_text(
        "lang,f1,f2,f3\n"
        "en,1,0,1\n"
        "fr,1,0,1\n"
        "de,0,1,1\n"
        "fi,1,1,0\n",
        encoding="utf-8",
    )
    return path


def test_analyze_diversity_of_identical_languages(features_csv, tmp_path):
    result = _invoke("analyze", "diversity", "--features", features_csv,
                     "--languages", "en,fr", "--out", tmp_path / "out")
    assert result.exit_code == 0, result.output
    report = read_json(tmp_path / "out" / "diversity.json")
    assert report["d_typ"] == 0.0
    assert report["sample"] == ["en", "fr"]


def test_analyze_similarity_of_one_language(features_csv, tmp_path):
    result = _invoke("analyze", "similarity", "--features", features_csv,
                     "--languages", "de", "--test-languages", "de", "--out", tmp_path / "out")
    assert result.exit_code == 0, result.output
    assert read_json(tmp_path / "out" / "similarity.json")["sim_train_test"] == pytest.approx(1.0)


def test_analyze_diversity_unknown_language_exits_2(features_csv, tmp_path):
    result = _invoke("analyze", "diversity", "--features", features_csv,
                     "--languages", "en,xx", "--out", tmp_path / "out")
    assert result.exit_code == 2


@pytest.fixture
def large_constraints(tmp_path):
    pairs = []
    for (l1, l2), n in {("en", "fr"): 600, ("en", "en"): 300, ("de", "fr"): 100}.items():
        pairs.extend(
            ConstraintPair(w1=f"a{i}", l1=l1, w2=f"b{i}", l2=l2, synset_id=f"{l1}{l2}:{i}") for i in range(n)
        )
    return write_constraints(pairs, tmp_path / "constraints.tsv")


@pytest.mark.parametrize("target", [10, 100, 1000])
def test_analyze_subset_sizes_are_exact(large_constraints, tmp_path, target):
    out = tmp_path / f"subset{target}"
    result = _invoke("analyze", "subset", "--constraints", large_constraints,
                     "--target-size", target, "--seed", 3, "--out", out)
    assert result.exit_code == 0, result.output
    assert len(read_constraints(out / "constraints.tsv")) == target
    quotas = read_json(out / "quotas.json")
    assert sum(quotas["quotas"].values()) == target
    assert quotas["total"] == 1000


def test_analyze_subset_too_large_exits_2(large_constraints, tmp_path):
    result = _invoke("analyze", "subset", "--constraints", large_constraints,
                     "--target-size", 1001, "--out", tmp_path / "out")
    assert result.exit_code == 2


def test_analyze_plan(tmp_path):
    result = _invoke("analyze", "plan", "--languages", ",".join(f"l{i}" for i in range(10)),
                     "--budget", 100, "--out", tmp_path / "out")
    assert result.exit_code == 0, result.output
    report = read_json(tmp_path / "out" / "plan.json")
    assert len(report["quotas"]) == 55
    assert report["target"] == 5_500


def test_analyze_plan_caps_constraints(large_constraints, tmp_path):
    result = _invoke("analyze", "plan", "--languages", "en,fr", "--budget", 50,
                     "--constraints", large_constraints, "--out", tmp_path / "out")
    assert result.exit_code == 0, result.output
    report = read_json(tmp_path / "out" / "plan.json")
    assert report["quotas"] == {"en-en": 50, "en-fr": 50, "fr-fr": 0}
    assert report["shortfalls"] == {"fr-fr": 50}
    assert len(read_constraints(tmp_path / "out" / "constraints.tsv")) == 100


def test_analyze_samples(features_csv, tmp_path):
    result = _invoke("analyze", "samples", "--features", features_csv, "--languages", "en,fr,de,fi",
                     "--test-languages", "fi", "--sample-size", 2, "--n-samples", 10,
                     "--n-bins", 2, "--out", tmp_path / "out")
    assert result.exit_code == 0, result.output
    reports = read_json(tmp_path / "out" / "samples.json")
    assert reports
    assert all("fi" not in r["sample"] for r in reports)


def test_distribution_report(large_constraints, tmp_path):
    result = _invoke("distribution", "--constraints", large_constraints, "--alpha", 1.0, "--out", tmp_path / "out")
    assert result.exit_code == 0, result.output
    report = read_json(tmp_path / "out" / "distribution.json")
    assert report["entries"]["en-fr"]["q"] == pytest.approx(0.6)
