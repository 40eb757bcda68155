"""
Training Loop

Contrastive specialization with AdamW. Every quarter of an epoch the model
is scored on the validation BLI sets; the validation metric is the mean
relative MRR improvement over the vanilla (pre-training) model, and the
state with the highest metric seen is kept. The vanilla state itself is the
starting best, with metric 0.0.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from autodiff.tensor import Tape, backward
from config.constants import VALIDATION_EVENTS_PER_EPOCH
from encoder.model import EncoderModel, encode_sense, encode_type, trainable_parameters
from evalsuite.datasets import BliDataset
from evalsuite.tasks import bli_mrr
from lexdata.models import ConstraintPair
from schemas import LossConfig, TrainConfig
from training.objective import BatchEmbeddings, info_nce_loss
from training.optimizer import OptimizerState, adamw_step
from training.sampler import Batch, BatchSampler, build_index, epoch_plan
from utils.errors import DataValidationError, GradientError, TrainingDiverged
from utils.reports import write_jsonl

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# ============================================================================
# VALIDATION
# ============================================================================

def relative_improvement(current_mrr: float, vanilla_mrr: float) -> float:
    """
    (current - vanilla) / vanilla.

    Raises:
        DataValidationError: If vanilla_mrr is 0 (improvement undefined)
    """
    if vanilla_mrr <= 0:
        raise DataValidationError(
            f"Relative improvement is undefined for a vanilla MRR of {vanilla_mrr}"
        )
    return (current_mrr - vanilla_mrr) / vanilla_mrr


def validation_metric(improvements: Sequence[float]) -> float:
    """Mean relative improvement over the validation sets."""
    if not improvements:
        raise DataValidationError("No validation sets to average")
    return float(np.mean(improvements))


def validation_boundaries(batches_per_epoch: int) -> List[int]:
    """
    1-based batch indices within an epoch after which validation runs.

    ceil(q * B / 4) for q = 1..4, de-duplicated; the last batch of the epoch
    is always a boundary.
    """
    if batches_per_epoch <= 0:
        raise DataValidationError("An epoch needs at least one batch")
    events = VALIDATION_EVENTS_PER_EPOCH
    return sorted({math.ceil(q * batches_per_epoch / events) for q in range(1, events + 1)})


class ValidationState:
    """Validation sets plus the vanilla scores they are compared against"""

    def __init__(self, datasets: Sequence[BliDataset]):
        names = [ds.dataset_id for ds in datasets]
        if len(set(names)) != len(names):
            raise DataValidationError(f"Validation set ids must be unique: {names}")
        self.datasets = list(datasets)
        self.vanilla_scores: Optional[Dict[str, float]] = None

    def __len__(self) -> int:
        return len(self.datasets)

    def score(self, model: EncoderModel) -> Dict[str, float]:
        """MRR of the output layer on every validation set."""
        return {ds.dataset_id: bli_mrr(model, model.num_layers, ds) for ds in self.datasets}

    def compute_vanilla(self, model: EncoderModel) -> Dict[str, float]:
        """Score the untrained model once; later calls return the stored scores."""
        if self.vanilla_scores is None:
            scores = self.score(model)
            zero = sorted(name for name, value in scores.items() if value <= 0)
            if zero:
                raise DataValidationError(f"Vanilla MRR is 0 on validation sets {zero}")
            self.vanilla_scores = scores
            logger.info("Vanilla validation MRR: %s", scores)
        return self.vanilla_scores

    def evaluate(self, model: EncoderModel) -> Tuple[Dict[str, float], Dict[str, float], float]:
        """
        Returns:
            (MRR per set, relative improvement per set, mean improvement)
        """
        if self.vanilla_scores is None:
            raise DataValidationError("compute_vanilla must run before training starts")
        mrr = self.score(model)
        improvements = {
            name: relative_improvement(value, self.vanilla_scores[name]) for name, value in mrr.items()
        }
        return mrr, improvements, validation_metric(list(improvements.values()))

    def exclusion_words(self) -> Set[Tuple[str, str]]:
        words: Set[Tuple[str, str]] = set()
        for ds in self.datasets:
            words |= ds.exclusion_words()
        return words


# ============================================================================
# RESULT
# ============================================================================

@dataclass
class TrainingResult:
    """
    Outcome of a run. best_metric is None when no validation sets were given,
    in which case the final state is the best state.
    """
    best_metric: Optional[float]
    best_step: int
    best_state: Dict[str, np.ndarray]
    log: List[Dict[str, Any]] = field(default_factory=list)
    steps: int = 0

    @property
    def validation_events(self) -> List[Dict[str, Any]]:
        return [r for r in self.log if r["event"] == "validation"]


# ============================================================================
# STEPS
# ============================================================================

def encode_batch(batch: Batch, model: EncoderModel, sense_level: bool = False) -> BatchEmbeddings:
    """Output-layer embeddings of both words of every pair, type- or sense-level."""
    first, second = [], []
    for pair in batch.pairs:
        if sense_level:
            first.append(encode_sense(pair.w1, pair.g1, model).final)
            second.append(encode_sense(pair.w2, pair.g2, model).final)
        else:
            first.append(encode_type(pair.w1, model).final)
            second.append(encode_type(pair.w2, model).final)
    return BatchEmbeddings.from_pairs(first, second, batch.synset_ids)


def train_step(
    batch: Batch,
    model: EncoderModel,
    loss_config: LossConfig,
    state: OptimizerState,
    sense_level: bool = False,
) -> float:
    """
    One update: encode, loss, backward, AdamW.

    Returns:
        The batch loss before the update

    Raises:
        GradientError: If the loss or a gradient is not finite (parameters untouched)
    """
    tape = Tape()
    with tape.recording():
        embeddings = encode_batch(batch, model, sense_level)
        loss = info_nce_loss(embeddings, loss_config)
    value = loss.item()
    if not math.isfinite(value):
        tape.clear()
        raise GradientError(f"Non-finite loss {value}")
    backward(loss)
    tape.clear()
    adamw_step(trainable_parameters(model), state)
    return value


def _warn_on_overlap(constraints: Sequence[ConstraintPair], validation: Optional[ValidationState]) -> None:
    if not validation:
        return
    held_out = validation.exclusion_words()
    leaked = sum(
        1 for p in constraints if (p.w1, p.l1) in held_out or (p.w2, p.l2) in held_out
    )
    if leaked:
        logger.warning("%d constraints share words with the validation sets", leaked)


def train(
    constraints: Sequence[ConstraintPair],
    model: EncoderModel,
    train_config: TrainConfig,
    validation_state: Optional[ValidationState] = None,
    log_path: Optional[PathLike] = None,
) -> TrainingResult:
    """
    Specialize a model on synonym constraints.

    Runs epochs x ceil(|constraints| / N_B) steps. On return the model holds
    the best state; the log is also written to log_path as JSON lines.

    Args:
        constraints: Training constraints
        model: Model to train in place (its mode must match train_config.mode)
        train_config: Hyperparameters
        validation_state: Held-out BLI sets; None trains without selection
        log_path: Optional JSON-lines log destination

    Returns:
        TrainingResult with the best state

    Raises:
        DataValidationError: On invalid inputs or a zero vanilla MRR
        TrainingDiverged: On a non-finite loss or gradient; carries the best result so far
    """
    if model.config.mode != train_config.mode:
        raise DataValidationError(
            f"Model built for mode '{model.config.mode}' but training mode is '{train_config.mode}'"
        )
    if not constraints:
        raise DataValidationError("No training constraints")
    _warn_on_overlap(constraints, validation_state)

    index = build_index(constraints)
    sampler = BatchSampler(index, train_config.sampler_config())
    batches_per_epoch = epoch_plan(index.total, train_config.batch_size)
    boundaries = set(validation_boundaries(batches_per_epoch))
    loss_config = train_config.loss_config()
    optimizer = OptimizerState.create(trainable_parameters(model), train_config.adamw_config())

    validating = bool(validation_state)
    log: List[Dict[str, Any]] = []
    if validating:
        vanilla = validation_state.compute_vanilla(model)
        log.append({"event": "vanilla", "step": 0, "mrr": dict(vanilla)})
    result = TrainingResult(
        best_metric=0.0 if validating else None,
        best_step=0,
        best_state=model.state_dict(),
        log=log,
    )
    logger.info(
        "Training %d epochs x %d batches (mode=%s, lr=%s, tau=%s)",
        train_config.epochs, batches_per_epoch, train_config.mode,
        train_config.learning_rate, train_config.tau,
    )

    step = 0
    try:
        for epoch in range(1, train_config.epochs + 1):
            for batch_number in range(1, batches_per_epoch + 1):
                step += 1
                try:
                    loss = train_step(
                        sampler.next_batch(), model, loss_config, optimizer, train_config.sense_level
                    )
                except GradientError as e:
                    result.steps = step - 1
                    raise TrainingDiverged(f"Training diverged at step {step}: {e}", result) from e
                log.append({"event": "step", "step": step, "epoch": epoch, "loss": loss})
                logger.debug("step %d epoch %d loss %.6f", step, epoch, loss)

                if validating and batch_number in boundaries:
                    mrr, improvements, metric = validation_state.evaluate(model)
                    log.append({
                        "event": "validation",
                        "step": step,
                        "epoch": epoch,
                        "mrr": mrr,
                        "relative_improvements": improvements,
                        "mean": metric,
                    })
                    if metric > result.best_metric:
                        result.best_metric = metric
                        result.best_step = step
                        result.best_state = model.state_dict()
                    logger.info(
                        "Validation at step %d: mean improvement %.4f (best %.4f @ %d)",
                        step, metric, result.best_metric, result.best_step,
                    )
        result.steps = step
        if not validating:
            result.best_step = step
            result.best_state = model.state_dict()
    finally:
        if log_path is not None:
            write_jsonl(log_path, log)

    model.load_state_dict(result.best_state)
    return result
