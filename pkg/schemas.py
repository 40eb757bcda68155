"""
Pydantic Schemas

Configuration and report models. Field constraints carry the documented
invariants; unknown keys are rejected everywhere.
"""

import math
from typing import Dict, FrozenSet, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.constants import (
    ADAPTER_REDUCTION_RATIO,
    DEFAULT_ALPHA,
    DEFAULT_BATCH_SIZE,
    DEFAULT_BETA1,
    DEFAULT_BETA2,
    DEFAULT_DIM,
    DEFAULT_EPOCHS,
    DEFAULT_EPS,
    DEFAULT_FFN_DIM,
    DEFAULT_FREQUENCY_CUTOFF,
    DEFAULT_GLOSS_LANGUAGE_PRIORITY,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_SEQUENCE_LENGTH,
    DEFAULT_NUM_LAYERS,
    DEFAULT_SEED_COUNT,
    DEFAULT_TAU,
    DEFAULT_WEIGHT_DECAY,
)
from utils.validators import validate_language_code

TrainingMode = Literal["full", "adapter"]
PositivePairMode = Literal["all", "cross_slot"]
EvalTask = Literal["bli", "xlsim", "retrieval"]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _check_codes(codes) -> None:
    for code in codes:
        is_valid, error = validate_language_code(code)
        if not is_valid:
            raise ValueError(error)


# ============================================================================
# MINING
# ============================================================================

class MiningConfig(StrictModel):
    languages: FrozenSet[str] = Field(min_length=1)
    seed_count: int = Field(default=DEFAULT_SEED_COUNT, gt=0)
    frequency_cutoff: int = Field(default=DEFAULT_FREQUENCY_CUTOFF, gt=0)
    stopwords: FrozenSet[str] = frozenset()
    exclusion_words: FrozenSet[Tuple[str, str]] = frozenset()
    gloss_language_priority: Tuple[str, ...] = tuple(DEFAULT_GLOSS_LANGUAGE_PRIORITY)

    @field_validator("languages", "gloss_language_priority")
    @classmethod
    def _codes_well_formed(cls, value):
        _check_codes(value)
        return value


class MiningStats(StrictModel):
    """Per-language-pair constraint counts (keys like "en-fr")"""
    total: int
    pair_counts: Dict[str, int]
    languages: List[str]


# ============================================================================
# SAMPLING
# ============================================================================

class SamplerConfig(StrictModel):
    alpha: float = Field(default=DEFAULT_ALPHA, gt=0.0, le=1.0)
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=2)
    seed: int = 0


class DistributionEntry(StrictModel):
    n: int
    p: float
    q: float


class DistributionReport(StrictModel):
    alpha: float
    total: int
    entries: Dict[str, DistributionEntry]


# ============================================================================
# ENCODER
# ============================================================================

class EncoderConfig(StrictModel):
    dim: int = Field(default=DEFAULT_DIM, gt=0)
    num_layers: int = Field(default=DEFAULT_NUM_LAYERS, ge=0)
    ffn_dim: int = Field(default=DEFAULT_FFN_DIM, gt=0)
    adapter_bottleneck: Optional[int] = Field(default=None, gt=0)
    mode: TrainingMode = "full"
    max_sequence_length: int = Field(default=DEFAULT_MAX_SEQUENCE_LENGTH, gt=2)

    @model_validator(mode="after")
    def _bottleneck(self):
        if self.adapter_bottleneck is None:
            object.__setattr__(
                self, "adapter_bottleneck", math.ceil(self.dim / ADAPTER_REDUCTION_RATIO)
            )
        if self.mode == "adapter" and self.adapter_bottleneck >= self.dim:
            raise ValueError(
                f"adapter_bottleneck ({self.adapter_bottleneck}) must be smaller than dim ({self.dim})"
            )
        return self


# ============================================================================
# OBJECTIVE / OPTIMIZER / TRAINING
# ============================================================================

class LossConfig(StrictModel):
    tau: float = Field(default=DEFAULT_TAU, gt=0.0)
    positive_pairs: PositivePairMode = "all"


class AdamWConfig(StrictModel):
    lr: float = Field(default=DEFAULT_LEARNING_RATE, gt=0.0)
    beta1: float = Field(default=DEFAULT_BETA1, ge=0.0, lt=1.0)
    beta2: float = Field(default=DEFAULT_BETA2, ge=0.0, lt=1.0)
    eps: float = Field(default=DEFAULT_EPS, gt=0.0)
    weight_decay: float = Field(default=DEFAULT_WEIGHT_DECAY, ge=0.0)


class TrainConfig(StrictModel):
    learning_rate: float = Field(default=DEFAULT_LEARNING_RATE, gt=0.0)
    epochs: int = Field(default=DEFAULT_EPOCHS, ge=1)
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=2)
    seed: int = 0
    mode: TrainingMode = "full"
    sense_level: bool = False
    alpha: float = Field(default=DEFAULT_ALPHA, gt=0.0, le=1.0)
    tau: float = Field(default=DEFAULT_TAU, gt=0.0)
    positive_pairs: PositivePairMode = "all"
    beta1: float = Field(default=DEFAULT_BETA1, ge=0.0, lt=1.0)
    beta2: float = Field(default=DEFAULT_BETA2, ge=0.0, lt=1.0)
    eps: float = Field(default=DEFAULT_EPS, gt=0.0)
    weight_decay: float = Field(default=DEFAULT_WEIGHT_DECAY, ge=0.0)

    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(alpha=self.alpha, batch_size=self.batch_size, seed=self.seed)

    def loss_config(self) -> LossConfig:
        return LossConfig(tau=self.tau, positive_pairs=self.positive_pairs)

    def adamw_config(self) -> AdamWConfig:
        return AdamWConfig(
            lr=self.learning_rate,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            weight_decay=self.weight_decay,
        )


# ============================================================================
# RUN CONFIG (CLI)
# ============================================================================

def _split_codes(value: Optional[str]) -> List[str]:
    if not value:
        return []
    return [code.strip() for code in value.split(",") if code.strip()]


class RunConfig(StrictModel):
    """Flat run configuration: file < LEXSPEC_* environment < flags"""
    seed: int = 0
    # mining
    languages: Optional[str] = None  # comma-separated codes
    seed_count: int = Field(default=DEFAULT_SEED_COUNT, gt=0)
    frequency_cutoff: int = Field(default=DEFAULT_FREQUENCY_CUTOFF, gt=0)
    gloss_language_priority: str = ",".join(DEFAULT_GLOSS_LANGUAGE_PRIORITY)
    # sampling / objective / optimizer
    alpha: float = Field(default=DEFAULT_ALPHA, gt=0.0, le=1.0)
    tau: float = Field(default=DEFAULT_TAU, gt=0.0)
    positive_pairs: PositivePairMode = "all"
    lr: float = Field(default=DEFAULT_LEARNING_RATE, gt=0.0)
    weight_decay: float = Field(default=DEFAULT_WEIGHT_DECAY, ge=0.0)
    beta1: float = Field(default=DEFAULT_BETA1, ge=0.0, lt=1.0)
    beta2: float = Field(default=DEFAULT_BETA2, ge=0.0, lt=1.0)
    eps: float = Field(default=DEFAULT_EPS, gt=0.0)
    epochs: int = Field(default=DEFAULT_EPOCHS, ge=1)
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=2)
    mode: TrainingMode = "full"
    sense_level: bool = False
    # encoder
    dim: int = Field(default=DEFAULT_DIM, gt=0)
    num_layers: int = Field(default=DEFAULT_NUM_LAYERS, ge=0)
    ffn_dim: int = Field(default=DEFAULT_FFN_DIM, gt=0)
    adapter_bottleneck: Optional[int] = Field(default=None, gt=0)
    max_sequence_length: int = Field(default=DEFAULT_MAX_SEQUENCE_LENGTH, gt=2)
    # evaluation
    layer: Optional[int] = Field(default=None, ge=0)
    # analysis
    test_languages: Optional[str] = None  # comma-separated codes
    target_size: Optional[int] = Field(default=None, gt=0)
    budget: Optional[int] = Field(default=None, gt=0)
    sample_size: Optional[int] = Field(default=None, gt=0)
    n_samples: int = Field(default=1000, gt=0)
    n_bins: int = Field(default=10, gt=0)
    # synthetic benchmark
    concepts: int = Field(default=100, gt=0)
    # paths
    dump: Optional[str] = None
    freq_dir: Optional[str] = None
    stopwords: Optional[str] = None
    exclusions: Optional[str] = None
    constraints: Optional[str] = None
    vocab: Optional[str] = None
    word_vectors: Optional[str] = None
    valid_dir: Optional[str] = None
    model_in: Optional[str] = None
    dataset: Optional[str] = None
    dataset_vocab: Optional[str] = None
    features: Optional[str] = None
    out: Optional[str] = None

    def language_list(self) -> List[str]:
        return _split_codes(self.languages)

    def test_language_list(self) -> List[str]:
        return _split_codes(self.test_languages)

    def encoder_config(self) -> EncoderConfig:
        return EncoderConfig(
            dim=self.dim,
            num_layers=self.num_layers,
            ffn_dim=self.ffn_dim,
            adapter_bottleneck=self.adapter_bottleneck,
            mode=self.mode,
            max_sequence_length=self.max_sequence_length,
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.lr,
            epochs=self.epochs,
            batch_size=self.batch_size,
            seed=self.seed,
            mode=self.mode,
            sense_level=self.sense_level,
            alpha=self.alpha,
            tau=self.tau,
            positive_pairs=self.positive_pairs,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            weight_decay=self.weight_decay,
        )


# ============================================================================
# REPORTS
# ============================================================================

class EvalReport(StrictModel):
    task: EvalTask
    dataset_id: str
    layer_scores: List[Optional[float]]  # index = layer; None = undefined
    best_layer: Optional[int]
    best_score: Optional[float]
    checkpoint_id: str

    @model_validator(mode="after")
    def _best_is_max(self):
        defined = [s for s in self.layer_scores if s is not None]
        if not defined:
            if self.best_score is not None:
                raise ValueError("best_score set although every layer is undefined")
            return self
        if self.best_score != max(defined):
            raise ValueError("best_score must equal the maximum layer score")
        return self


class DiversityReport(StrictModel):
    sample: List[str]
    d_typ: float
    sim_train_test: Optional[float] = None
    test_languages: Optional[List[str]] = None


class QuotaReport(StrictModel):
    target: int
    total: int
    quotas: Dict[str, int]
    shortfalls: Dict[str, int] = {}
