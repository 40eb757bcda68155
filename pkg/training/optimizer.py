"""
AdamW

Adam moments with decoupled weight decay:
theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + lambda * theta).
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from autodiff.tensor import Tensor
from schemas import AdamWConfig
from utils.errors import GradientError


@dataclass
class OptimizerState:
    config: AdamWConfig
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0

    @classmethod
    def create(cls, params: Dict[str, Tensor], config: AdamWConfig) -> "OptimizerState":
        return cls(
            config=config,
            m={name: np.zeros_like(p.data) for name, p in params.items()},
            v={name: np.zeros_like(p.data) for name, p in params.items()},
        )


def adamw_step(params: Dict[str, Tensor], state: OptimizerState) -> None:
    """
    Apply one AdamW update in place and zero the gradients.

    Only tensors with requires_grad are touched.

    Raises:
        GradientError: If a gradient is missing or non-finite (names the parameter)
    """
    trainable = {name: p for name, p in params.items() if p.requires_grad}
    for name, p in trainable.items():
        if p.grad is None:
            raise GradientError(f"Parameter '{name}' has no gradient")
        if not np.all(np.isfinite(p.grad)):
            raise GradientError(f"Non-finite gradient for parameter '{name}'")
        if name not in state.m:
            state.m[name] = np.zeros_like(p.data)
            state.v[name] = np.zeros_like(p.data)

    cfg = state.config
    state.t += 1
    bias1 = 1.0 - cfg.beta1 ** state.t
    bias2 = 1.0 - cfg.beta2 ** state.t

    for name, p in trainable.items():
        g = p.grad
        m = state.m[name]
        v = state.v[name]
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * g * g
        m_hat = m / bias1
        v_hat = v / bias2
        p.data -= cfg.lr * (m_hat / (np.sqrt(v_hat) + cfg.eps) + cfg.weight_decay * p.data)
        p.zero_grad()
