"""
Encoder Model

A small transformer-style stack: token embeddings, single-head
self-attention and ReLU feed-forward blocks with residual connections, and
an optional bottleneck adapter after each block. Word and sentence vectors
are mean-pooled per layer over the word's own subwords only.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from autodiff import ops
from autodiff.tensor import Tensor
from config.constants import INIT_RANGE
from encoder.tokenizer import SubwordVocabulary, tokenize, tokenize_text
from schemas import EncoderConfig
from utils.errors import DataValidationError
from utils.validators import validate_word

logger = logging.getLogger(__name__)

ADAPTER_PREFIX = "adapter"


@dataclass
class WordEncoding:
    """Per-layer pooled vectors; layers[0] is post-embedding, layers[l] after block l"""
    layers: List[Tensor]
    pool_positions: List[int]
    token_ids: List[int]

    def vector(self, layer: int) -> np.ndarray:
        return self.layers[layer].data

    @property
    def final(self) -> Tensor:
        return self.layers[-1]


class EncoderModel:
    """
    Parameters live in an ordered name -> Tensor mapping; insertion order is
    the checkpoint manifest order.
    """

    def __init__(self, config: EncoderConfig, vocab: SubwordVocabulary, params: Dict[str, Tensor]):
        self.config = config
        self.vocab = vocab
        self.params = params
        # Diagnostic switch: replace attention weights with the identity matrix.
        self.self_attention_only = False
        self.apply_mode()

    @property
    def num_layers(self) -> int:
        return self.config.num_layers

    @property
    def has_adapters(self) -> bool:
        return self.config.mode == "adapter"

    def apply_mode(self) -> None:
        """Mark tensors trainable according to the configured mode."""
        for name, tensor in self.params.items():
            if self.config.mode == "full":
                tensor.set_requires_grad(True)
            else:
                tensor.set_requires_grad(is_adapter_parameter(name))

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: t.data.copy() for name, t in self.params.items()}

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        unknown = sorted(set(state) - set(self.params))
        missing = sorted(set(self.params) - set(state))
        if unknown or missing:
            raise DataValidationError(
                f"State mismatch: unknown tensors {unknown}, missing tensors {missing}"
            )
        for name, values in state.items():
            target = self.params[name]
            if target.shape != tuple(values.shape):
                raise DataValidationError(
                    f"Tensor '{name}' has shape {values.shape}, expected {target.shape}"
                )
            target.data[...] = values

    def zero_grad(self) -> None:
        for tensor in self.params.values():
            tensor.zero_grad()

    # ------------------------------------------------------------------
    # Forward
    # ------------------------------------------------------------------

    def _block(self, x: Tensor, layer: int) -> Tensor:
        p = self.params
        prefix = f"layers.{layer}"
        n = x.shape[0]
        d = self.config.dim

        # Positions enter the attention scores only, so the value path stays
        # position-free.
        xp = ops.add(x, ops.gather_rows(p["positions"], range(n)))
        values = ops.matmul(x, p[f"{prefix}.attention.w_v"])
        if self.self_attention_only:
            context = values
        else:
            queries = ops.matmul(xp, p[f"{prefix}.attention.w_q"])
            keys = ops.matmul(xp, p[f"{prefix}.attention.w_k"])
            scores = ops.scale(ops.matmul(queries, keys, transpose_b=True), 1.0 / math.sqrt(d))
            context = ops.matmul(ops.softmax_lastaxis(scores), values)
        x = ops.add(x, ops.matmul(context, p[f"{prefix}.attention.w_o"]))

        hidden = ops.relu(ops.add(ops.matmul(x, p[f"{prefix}.ffn.w_in"]), p[f"{prefix}.ffn.b_in"]))
        x = ops.add(x, ops.add(ops.matmul(hidden, p[f"{prefix}.ffn.w_out"]), p[f"{prefix}.ffn.b_out"]))

        if self.has_adapters:
            a = f"{prefix}.{ADAPTER_PREFIX}"
            down = ops.relu(ops.add(ops.matmul(x, p[f"{a}.w_down"]), p[f"{a}.b_down"]))
            x = ops.add(x, ops.add(ops.matmul(down, p[f"{a}.w_up"]), p[f"{a}.b_up"]))
        return x

    def hidden_states(self, ids: Sequence[int]) -> List[Tensor]:
        """Token representations after the embedding (index 0) and each block."""
        if len(ids) > self.config.max_sequence_length:
            raise DataValidationError(
                f"Sequence of {len(ids)} tokens exceeds max_sequence_length "
                f"{self.config.max_sequence_length}"
            )
        x = ops.gather_rows(self.params["embeddings"], ids)
        states = [x]
        for layer in range(self.num_layers):
            x = self._block(x, layer)
            states.append(x)
        return states

    def pooled(self, ids: Sequence[int], positions: Sequence[int]) -> List[Tensor]:
        """Mean over the given positions at every layer."""
        return [ops.mean_axis(ops.gather_rows(h, positions), axis=0) for h in self.hidden_states(ids)]


# ----------------------------------------------------------------------
# Encoding entry points
# ----------------------------------------------------------------------

def _word_ids(word: str, model: EncoderModel) -> List[int]:
    is_valid, error = validate_word(word)
    if not is_valid:
        raise DataValidationError(error)
    return tokenize(word, model.vocab)


def encode_type(word: str, model: EncoderModel) -> WordEncoding:
    """
    Type-level encoding: [SPEC1] sw_1..sw_m [SPEC2], pooled over positions 1..m.

    Raises:
        DataValidationError: If the framed word exceeds max_sequence_length
    """
    sub = _word_ids(word, model)
    ids = [model.vocab.spec1_id] + sub + [model.vocab.spec2_id]
    positions = list(range(1, len(sub) + 1))
    return WordEncoding(model.pooled(ids, positions), positions, ids)


def encode_sense(word: str, gloss: Optional[str], model: EncoderModel) -> WordEncoding:
    """
    Sense-level encoding: [SPEC1] sw_1..sw_m [SPEC2] g [SPEC2].

    The gloss only contextualizes: pooling covers sw_1..sw_m. An over-long
    gloss is truncated from the right; the word itself is never truncated.

    Raises:
        DataValidationError: If the word with its three special tokens does not fit
    """
    sub = _word_ids(word, model)
    vocab = model.vocab
    room = model.config.max_sequence_length - (len(sub) + 3)
    if room < 0:
        raise DataValidationError(
            f"Word '{word}' ({len(sub)} subwords) does not fit max_sequence_length "
            f"{model.config.max_sequence_length} with sense framing"
        )
    gloss_ids = tokenize_text(gloss or "", vocab)[:room]
    ids = [vocab.spec1_id] + sub + [vocab.spec2_id] + gloss_ids + [vocab.spec2_id]
    positions = list(range(1, len(sub) + 1))
    return WordEncoding(model.pooled(ids, positions), positions, ids)


def encode_sentence(sentence: str, model: EncoderModel) -> WordEncoding:
    """
    Sentence encoding: mean over all subword positions, special tokens excluded.

    Over-long sentences are truncated from the right.

    Raises:
        DataValidationError: If the sentence has no tokens
    """
    sub = tokenize_text(sentence, model.vocab)
    if not sub:
        raise DataValidationError("Cannot encode an empty sentence")
    sub = sub[: model.config.max_sequence_length - 2]
    ids = [model.vocab.spec1_id] + sub + [model.vocab.spec2_id]
    positions = list(range(1, len(sub) + 1))
    return WordEncoding(model.pooled(ids, positions), positions, ids)


# ----------------------------------------------------------------------
# Construction
# ----------------------------------------------------------------------

def is_adapter_parameter(name: str) -> bool:
    return f".{ADAPTER_PREFIX}." in name


def parameter_shapes(config: EncoderConfig, vocab_size: int) -> Dict[str, tuple]:
    """Ordered tensor names and shapes; base tensors first, adapters last."""
    d, f, b = config.dim, config.ffn_dim, config.adapter_bottleneck
    shapes = {
        "embeddings": (vocab_size, d),
        "positions": (config.max_sequence_length, d),
    }
    for layer in range(config.num_layers):
        prefix = f"layers.{layer}"
        shapes[f"{prefix}.attention.w_q"] = (d, d)
        shapes[f"{prefix}.attention.w_k"] = (d, d)
        shapes[f"{prefix}.attention.w_v"] = (d, d)
        shapes[f"{prefix}.attention.w_o"] = (d, d)
        shapes[f"{prefix}.ffn.w_in"] = (d, f)
        shapes[f"{prefix}.ffn.b_in"] = (f,)
        shapes[f"{prefix}.ffn.w_out"] = (f, d)
        shapes[f"{prefix}.ffn.b_out"] = (d,)
    if config.mode == "adapter":
        for layer in range(config.num_layers):
            a = f"layers.{layer}.{ADAPTER_PREFIX}"
            shapes[f"{a}.w_down"] = (d, b)
            shapes[f"{a}.b_down"] = (b,)
            shapes[f"{a}.w_up"] = (b, d)
            shapes[f"{a}.b_up"] = (d,)
    return shapes


def init_model(config: EncoderConfig, vocab: SubwordVocabulary, seed: int = 0) -> EncoderModel:
    """
    Randomly initialize a model.

    Every tensor is drawn from uniform(-0.05, 0.05) in manifest order, except
    the adapters' up-projections, which start at zero so each adapter is an
    identity residual. Base tensors are drawn before adapters, so the same
    seed gives identical base weights in both modes.
    """
    rng = np.random.default_rng(seed)
    params = {}
    for name, shape in parameter_shapes(config, len(vocab)).items():
        if name.endswith(".w_up") or name.endswith(".b_up"):
            values = np.zeros(shape)
        else:
            values = rng.uniform(-INIT_RANGE, INIT_RANGE, size=shape)
        params[name] = Tensor(values, name=name)
    logger.debug("Initialized %d tensors (mode=%s, seed=%d)", len(params), config.mode, seed)
    return EncoderModel(config, vocab, params)


def trainable_parameters(model: EncoderModel) -> Dict[str, Tensor]:
    """All tensors in full mode; adapter tensors only in adapter mode."""
    return {name: t for name, t in model.params.items() if t.requires_grad}


def count_scalars(params: Dict[str, Tensor]) -> int:
    return sum(t.size for t in params.values())


def with_mode(model: EncoderModel, mode: str, seed: int = 0) -> EncoderModel:
    """
    The same base weights under another training mode.

    Tensors present in both layouts are copied; adapters that did not exist
    before start from the usual initialization with the given seed.
    """
    if mode == model.config.mode:
        return model
    config = EncoderConfig(**{**model.config.model_dump(), "mode": mode})
    converted = init_model(config, model.vocab, seed)
    for name, tensor in converted.params.items():
        if name in model.params:
            tensor.data[...] = model.params[name].data
    return converted
