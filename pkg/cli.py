"""
lexspec Command Line

Batch commands for mining, training, evaluation and analysis. Every command
resolves its configuration from a key=value file, LEXSPEC_* environment
variables and flags (later wins), writes resolved_config.json next to its
outputs and exits with 0 on success, 1 on I/O failure and 2 on invalid
input.
"""

import functools
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import typer
from dotenv import dotenv_values
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from analysis.ablation import apply_quota, fixed_budget_mining_plan, subset_constraints, subset_report
from analysis.typology import diversity_report, load_feature_matrix, sample_language_sets
from config.constants import (
    BEST_CHECKPOINT_DIR,
    EXIT_IO,
    EXIT_VALIDATION,
    RESOURCE_RUN_CONFIG,
    TRAINING_LOG,
)
from config.settings import APP_NAME, configure_logging, env_overrides, validate_settings
from encoder.checkpoint import checkpoint_id, load_checkpoint, load_word_vectors, save_checkpoint
from encoder.model import init_model, with_mode
from encoder.tokenizer import SubwordVocabulary
from evalsuite.datasets import load_bli_dataset, load_retrieval_dataset, load_xlsim_dataset
from evalsuite.tasks import evaluate_layer, layer_sweep
from lexdata.constraints_io import read_constraints, write_constraints
from lexdata.mining import constraint_stats, mine_constraints
from lexdata.resources import load_exclusions, load_frequency_lists, load_synset_dump, load_word_set
from lexdata.synthetic import build_synthetic_benchmark
from schemas import MiningConfig, QuotaReport, RunConfig
from training.sampler import build_index, distribution_report
from training.trainer import TrainingResult, ValidationState, train
from utils.errors import ArtifactIOError, DataValidationError, TrainingDiverged
from utils.reports import write_json

logger = logging.getLogger(__name__)

app = typer.Typer(name=APP_NAME, help="Multilingual lexical specialization toolkit", no_args_is_help=True)
analyze_app = typer.Typer(help="Typological and constraint-budget analyses", no_args_is_help=True)
app.add_typer(analyze_app, name="analyze")

console = Console()

VANILLA_CHECKPOINT_DIR = "vanilla_checkpoint"


# ============================================================================
# CONFIG RESOLUTION
# ============================================================================

def _normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def parse_overrides(items: Optional[List[str]]) -> Dict[str, str]:
    """Parse repeated --set KEY=VALUE options."""
    overrides = {}
    for item in items or []:
        if "=" not in item:
            raise DataValidationError(f"--set expects KEY=VALUE, got '{item}'")
        key, value = item.split("=", 1)
        overrides[_normalize_key(key)] = value.strip()
    return overrides


def resolve_config(
    config_file: Optional[Path],
    overrides: Optional[List[str]] = None,
    **flags: Any,
) -> RunConfig:
    """
    Merge config file < LEXSPEC_* environment < --set < named flags.

    Raises:
        ArtifactIOError: If the config file does not exist
        DataValidationError: On unknown keys or invalid values
    """
    values: Dict[str, Any] = {}
    if config_file is not None:
        if not Path(config_file).is_file():
            raise ArtifactIOError(f"Config file not found: {config_file}")
        values.update({
            _normalize_key(k): v for k, v in dotenv_values(config_file).items() if v is not None
        })
    values.update(env_overrides())
    values.update(parse_overrides(overrides))
    values.update({k: v for k, v in flags.items() if v is not None})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise DataValidationError(f"Invalid configuration: {problems}") from e


def _require(config: RunConfig, *keys: str) -> None:
    missing = [k for k in keys if getattr(config, k) in (None, "")]
    if missing:
        raise DataValidationError(f"Missing required setting(s): {', '.join(missing)}")


def _out_dir(config: RunConfig) -> Path:
    _require(config, "out")
    out = Path(config.out)
    write_json(out / RESOURCE_RUN_CONFIG, config.model_dump(mode="json"))
    return out


def handle_errors(command):
    """Map toolkit errors onto the documented exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        configure_logging()
        try:
            validate_settings()
            return command(*args, **kwargs)
        except DataValidationError as e:
            console.print(f"[bold red]Invalid input:[/bold red] {e}")
            raise typer.Exit(code=EXIT_VALIDATION)
        except ArtifactIOError as e:
            console.print(f"[bold red]I/O error:[/bold red] {e}")
            raise typer.Exit(code=EXIT_IO)
        except ValueError as e:
            console.print(f"[bold red]Invalid setting:[/bold red] {e}")
            raise typer.Exit(code=EXIT_VALIDATION)

    return wrapper


ConfigOption = typer.Option(None, "--config", "-c", help="key=value config file")
SetOption = typer.Option(None, "--set", help="Override any config key: KEY=VALUE (repeatable)")


# ============================================================================
# MINING
# ============================================================================

@app.command()
@handle_errors
def mine(
    dump: Optional[str] = typer.Option(None, help="Synset dump (JSON lines)"),
    freq_dir: Optional[str] = typer.Option(None, help="Directory of <lang>.freq files"),
    languages: Optional[str] = typer.Option(None, help="Comma-separated language codes"),
    seed_count: Optional[int] = typer.Option(None, help="Number of English seed words"),
    frequency_cutoff: Optional[int] = typer.Option(None, help="Top-k words kept per language"),
    stopwords: Optional[str] = typer.Option(None, help="English stopword file"),
    exclusions: Optional[str] = typer.Option(None, help="word<TAB>lang file of held-out words"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Mine synonym constraints from a synset dump."""
    cfg = resolve_config(
        config, set_, dump=dump, freq_dir=freq_dir, languages=languages, seed_count=seed_count,
        frequency_cutoff=frequency_cutoff, stopwords=stopwords, exclusions=exclusions, out=out,
    )
    _require(cfg, "dump", "freq_dir", "languages")
    out_dir = _out_dir(cfg)

    mining = MiningConfig(
        languages=frozenset(cfg.language_list()),
        seed_count=cfg.seed_count,
        frequency_cutoff=cfg.frequency_cutoff,
        stopwords=frozenset(load_word_set(cfg.stopwords)) if cfg.stopwords else frozenset(),
        exclusion_words=frozenset(load_exclusions(cfg.exclusions)) if cfg.exclusions else frozenset(),
        gloss_language_priority=tuple(c for c in cfg.gloss_language_priority.split(",") if c),
    )
    freq_languages = set(mining.languages) | {"en"}
    freqs = load_frequency_lists(cfg.freq_dir, sorted(freq_languages))
    pairs = mine_constraints(load_synset_dump(cfg.dump), freqs, mining)

    write_constraints(pairs, out_dir / "constraints.tsv")
    stats = constraint_stats(pairs)
    write_json(out_dir / "stats.json", stats)
    console.print(f"[green]Mined {stats.total} constraints[/green] over {len(stats.pair_counts)} language pairs")


# ============================================================================
# TRAINING
# ============================================================================

def load_validation_sets(valid_dir: Optional[str]) -> ValidationState:
    """Every <src>-<tgt>.tsv in the directory with its <src>-<tgt>.vocab."""
    if not valid_dir:
        return ValidationState([])
    directory = Path(valid_dir)
    if not directory.is_dir():
        raise ArtifactIOError(f"Validation directory not found: {directory}")
    datasets = []
    for pairs_path in sorted(directory.glob("*.tsv")):
        vocab_path = pairs_path.with_suffix(".vocab")
        if not vocab_path.is_file():
            raise ArtifactIOError(f"Missing vocabulary {vocab_path} for {pairs_path}")
        datasets.append(load_bli_dataset(pairs_path, vocab_path))
    return ValidationState(datasets)


def _initial_model(cfg: RunConfig):
    if cfg.model_in:
        return with_mode(load_checkpoint(cfg.model_in), cfg.mode, cfg.seed)
    _require(cfg, "vocab")
    model = init_model(cfg.encoder_config(), SubwordVocabulary.from_file(cfg.vocab), cfg.seed)
    if cfg.word_vectors:
        load_word_vectors(cfg.word_vectors, model)
    return model


def _print_result(result: TrainingResult) -> None:
    table = Table(title="Training")
    table.add_column("steps")
    table.add_column("best step")
    table.add_column("best validation metric")
    metric = "n/a" if result.best_metric is None else f"{result.best_metric:.4f}"
    table.add_row(str(result.steps), str(result.best_step), metric)
    console.print(table)


@app.command("train")
@handle_errors
def train_command(
    constraints: Optional[str] = typer.Option(None, help="Constraint TSV"),
    vocab: Optional[str] = typer.Option(None, help="Subword vocabulary (new model)"),
    word_vectors: Optional[str] = typer.Option(None, help="Text word vectors for the embedding table"),
    model_in: Optional[str] = typer.Option(None, help="Checkpoint to start from"),
    valid_dir: Optional[str] = typer.Option(None, help="Directory of validation BLI sets"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    lr: Optional[float] = typer.Option(None, help="Learning rate"),
    epochs: Optional[int] = typer.Option(None, help="Epochs"),
    batch_size: Optional[int] = typer.Option(None, help="Constraints per batch"),
    mode: Optional[str] = typer.Option(None, help="full or adapter"),
    sense_level: Optional[bool] = typer.Option(None, "--sense-level/--type-level", help="Encode with glosses"),
    seed: Optional[int] = typer.Option(None, help="Random seed"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Specialize an encoder on constraints; keeps the best validation checkpoint."""
    cfg = resolve_config(
        config, set_, constraints=constraints, vocab=vocab, word_vectors=word_vectors,
        model_in=model_in, valid_dir=valid_dir, out=out, lr=lr, epochs=epochs,
        batch_size=batch_size, mode=mode, sense_level=sense_level, seed=seed,
    )
    _require(cfg, "constraints")
    out_dir = _out_dir(cfg)

    pairs = read_constraints(cfg.constraints)
    model = _initial_model(cfg)
    validation = load_validation_sets(cfg.valid_dir)
    save_checkpoint(model, out_dir / VANILLA_CHECKPOINT_DIR)

    try:
        result = train(pairs, model, cfg.train_config(), validation, out_dir / TRAINING_LOG)
    except TrainingDiverged as e:
        if e.result is not None:
            model.load_state_dict(e.result.best_state)
            save_checkpoint(model, out_dir / BEST_CHECKPOINT_DIR)
        raise DataValidationError(str(e)) from e

    best = save_checkpoint(model, out_dir / BEST_CHECKPOINT_DIR)
    write_json(out_dir / "training_summary.json", {
        "best_metric": result.best_metric,
        "best_step": result.best_step,
        "steps": result.steps,
        "checkpoint_id": checkpoint_id(best),
    })
    _print_result(result)


# ============================================================================
# EVALUATION
# ============================================================================

def _evaluate(task: str, cfg: RunConfig, dataset) -> None:
    _require(cfg, "model_in")
    out_dir = _out_dir(cfg)
    model = load_checkpoint(cfg.model_in)
    ckpt = checkpoint_id(cfg.model_in)
    if cfg.layer is None:
        report = layer_sweep(model, dataset, task, ckpt)
    else:
        report = evaluate_layer(model, dataset, task, cfg.layer, ckpt)
    write_json(out_dir / f"eval_{task}_{report.dataset_id}.json", report)
    score = "undefined" if report.best_score is None else f"{report.best_score:.5f}"
    console.print(f"[bold]{task}[/bold] {report.dataset_id}: best layer {report.best_layer}, score {score}")


@app.command("eval-bli")
@handle_errors
def eval_bli(
    model_in: Optional[str] = typer.Option(None, help="Checkpoint directory"),
    dataset: Optional[str] = typer.Option(None, help="BLI pairs TSV named <src>-<tgt>.tsv"),
    dataset_vocab: Optional[str] = typer.Option(None, help="Target vocabulary file"),
    layer: Optional[int] = typer.Option(None, help="Layer to score; all layers when omitted"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Bilingual lexicon induction (MRR)."""
    cfg = resolve_config(config, set_, model_in=model_in, dataset=dataset,
                         dataset_vocab=dataset_vocab, layer=layer, out=out)
    _require(cfg, "dataset", "dataset_vocab")
    _evaluate("bli", cfg, load_bli_dataset(cfg.dataset, cfg.dataset_vocab))


@app.command("eval-xlsim")
@handle_errors
def eval_xlsim(
    model_in: Optional[str] = typer.Option(None, help="Checkpoint directory"),
    dataset: Optional[str] = typer.Option(None, help="w1<TAB>w2<TAB>score file named <l1>-<l2>.tsv"),
    layer: Optional[int] = typer.Option(None, help="Layer to score; all layers when omitted"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Cross-lingual word similarity (Spearman's rho)."""
    cfg = resolve_config(config, set_, model_in=model_in, dataset=dataset, layer=layer, out=out)
    _require(cfg, "dataset")
    _evaluate("xlsim", cfg, load_xlsim_dataset(cfg.dataset))


@app.command("eval-retrieval")
@handle_errors
def eval_retrieval(
    model_in: Optional[str] = typer.Option(None, help="Checkpoint directory"),
    dataset: Optional[str] = typer.Option(None, help="foreign<TAB>english sentence pairs"),
    layer: Optional[int] = typer.Option(None, help="Layer to score; all layers when omitted"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Sentence retrieval (nearest-neighbour accuracy)."""
    cfg = resolve_config(config, set_, model_in=model_in, dataset=dataset, layer=layer, out=out)
    _require(cfg, "dataset")
    _evaluate("retrieval", cfg, load_retrieval_dataset(cfg.dataset))


# ============================================================================
# ANALYSIS
# ============================================================================

@analyze_app.command("diversity")
@handle_errors
def analyze_diversity(
    features: Optional[str] = typer.Option(None, help="Feature matrix CSV"),
    languages: Optional[str] = typer.Option(None, help="Comma-separated language sample"),
    test_languages: Optional[str] = typer.Option(None, help="Optional test languages for similarity"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Typological diversity index of a language sample."""
    cfg = resolve_config(config, set_, features=features, languages=languages,
                         test_languages=test_languages, out=out)
    _require(cfg, "features", "languages")
    out_dir = _out_dir(cfg)
    report = diversity_report(cfg.language_list(), load_feature_matrix(cfg.features),
                              cfg.test_language_list() or None)
    write_json(out_dir / "diversity.json", report)
    console.print(f"d_typ = {report.d_typ:.5f}")


@analyze_app.command("similarity")
@handle_errors
def analyze_similarity(
    features: Optional[str] = typer.Option(None, help="Feature matrix CSV"),
    languages: Optional[str] = typer.Option(None, help="Comma-separated training languages"),
    test_languages: Optional[str] = typer.Option(None, help="Comma-separated test languages"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Mean feature-vector cosine between training and test languages."""
    cfg = resolve_config(config, set_, features=features, languages=languages,
                         test_languages=test_languages, out=out)
    _require(cfg, "features", "languages", "test_languages")
    out_dir = _out_dir(cfg)
    report = diversity_report(cfg.language_list(), load_feature_matrix(cfg.features),
                              cfg.test_language_list())
    write_json(out_dir / "similarity.json", report)
    console.print(f"sim(train, test) = {report.sim_train_test:.5f}")


@analyze_app.command("subset")
@handle_errors
def analyze_subset(
    constraints: Optional[str] = typer.Option(None, help="Constraint TSV"),
    target_size: Optional[int] = typer.Option(None, help="Subset size"),
    seed: Optional[int] = typer.Option(None, help="Random seed"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Distribution-preserving constraint subset."""
    cfg = resolve_config(config, set_, constraints=constraints, target_size=target_size, seed=seed, out=out)
    _require(cfg, "constraints", "target_size")
    out_dir = _out_dir(cfg)
    pairs = read_constraints(cfg.constraints)
    subset = subset_constraints(pairs, cfg.target_size, cfg.seed)
    write_constraints(subset, out_dir / "constraints.tsv")
    write_json(out_dir / "quotas.json", subset_report(pairs, cfg.target_size))
    console.print(f"Kept {len(subset)} of {len(pairs)} constraints")


@analyze_app.command("plan")
@handle_errors
def analyze_plan(
    languages: Optional[str] = typer.Option(None, help="Comma-separated language sample"),
    budget: Optional[int] = typer.Option(None, help="Constraints per language pair"),
    constraints: Optional[str] = typer.Option(None, help="Constraint TSV to cap (optional)"),
    seed: Optional[int] = typer.Option(None, help="Random seed"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Fixed per-pair budget over monolingual and cross-lingual pairs."""
    cfg = resolve_config(config, set_, languages=languages, budget=budget,
                         constraints=constraints, seed=seed, out=out)
    _require(cfg, "languages", "budget")
    out_dir = _out_dir(cfg)
    plan = fixed_budget_mining_plan(cfg.language_list(), cfg.budget)
    if cfg.constraints:
        kept, report = apply_quota(read_constraints(cfg.constraints), plan, cfg.seed)
        write_constraints(kept, out_dir / "constraints.tsv")
    else:
        report = QuotaReport(
            target=sum(plan.values()),
            total=sum(plan.values()),
            quotas={f"{a}-{b}": n for (a, b), n in sorted(plan.items())},
        )
    write_json(out_dir / "plan.json", report)
    console.print(f"{len(plan)} language pairs, {report.target} constraints planned, {report.total} kept")


@analyze_app.command("samples")
@handle_errors
def analyze_samples(
    features: Optional[str] = typer.Option(None, help="Feature matrix CSV"),
    languages: Optional[str] = typer.Option(None, help="Comma-separated candidate pool"),
    test_languages: Optional[str] = typer.Option(None, help="Languages never sampled"),
    sample_size: Optional[int] = typer.Option(None, help="Languages per sample"),
    n_samples: Optional[int] = typer.Option(None, help="Random samples to draw"),
    n_bins: Optional[int] = typer.Option(None, help="Equal-width d_typ bins"),
    seed: Optional[int] = typer.Option(None, help="Random seed"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Language samples spread over the diversity range, one per bin."""
    cfg = resolve_config(config, set_, features=features, languages=languages,
                         test_languages=test_languages, sample_size=sample_size,
                         n_samples=n_samples, n_bins=n_bins, seed=seed, out=out)
    _require(cfg, "features", "languages", "sample_size")
    out_dir = _out_dir(cfg)
    reports = sample_language_sets(
        cfg.language_list(), cfg.sample_size, cfg.n_samples, cfg.n_bins,
        load_feature_matrix(cfg.features), cfg.test_language_list(), cfg.seed,
    )
    write_json(out_dir / "samples.json", reports)
    console.print(f"{len(reports)} samples kept")


# ============================================================================
# SAMPLER / SYNTHETIC DATA
# ============================================================================

@app.command()
@handle_errors
def distribution(
    constraints: Optional[str] = typer.Option(None, help="Constraint TSV"),
    alpha: Optional[float] = typer.Option(None, help="Smoothing exponent"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Smoothed language-pair sampling distribution of a constraint set."""
    cfg = resolve_config(config, set_, constraints=constraints, alpha=alpha, out=out)
    _require(cfg, "constraints")
    out_dir = _out_dir(cfg)
    report = distribution_report(build_index(read_constraints(cfg.constraints)), cfg.alpha)
    write_json(out_dir / "distribution.json", report)

    table = Table(title=f"alpha = {cfg.alpha}")
    for column in ("pair", "n", "p", "q"):
        table.add_column(column)
    for name, entry in report.entries.items():
        table.add_row(name, str(entry.n), f"{entry.p:.4f}", f"{entry.q:.4f}")
    console.print(table)


@app.command()
@handle_errors
def synth(
    concepts: Optional[int] = typer.Option(None, help="Latent concepts (at most 100)"),
    dim: Optional[int] = typer.Option(None, help="Vector dimension"),
    seed: Optional[int] = typer.Option(None, help="Random seed"),
    out: Optional[str] = typer.Option(None, help="Output directory"),
    config: Optional[Path] = ConfigOption,
    set_: Optional[List[str]] = SetOption,
):
    """Write the two-language synthetic benchmark."""
    cfg = resolve_config(config, set_, concepts=concepts, dim=dim, seed=seed, out=out)
    out_dir = _out_dir(cfg)
    benchmark = build_synthetic_benchmark(concepts=cfg.concepts, seed=cfg.seed, dim=cfg.dim)
    benchmark.write(out_dir)
    console.print(
        f"Wrote {len(benchmark.constraints)} constraints, {len(benchmark.validation)} validation sets "
        f"and {len(benchmark.test)} test queries to {out_dir}"
    )


if __name__ == "__main__":
    app()
