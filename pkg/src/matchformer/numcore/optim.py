"""AdamW with decoupled weight decay, and the linear warmup/decay schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, NumericError


@dataclass
class AdamWState:
    """Per-parameter first/second moment estimates and the step counter."""

    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: int = 0

    @classmethod
    def for_params(cls, params: dict) -> "AdamWState":
        return cls(
            m={k: np.zeros_like(p.data) for k, p in params.items()},
            v={k: np.zeros_like(p.data) for k, p in params.items()},
            t=0,
        )


def adamw_step(
    params: dict,
    grads: dict,
    state: AdamWState,
    lr: float,
    betas=(0.9, 0.999),
    eps: float = 1e-8,
    weight_decay: float = 0.0,
) -> None:
    """One in-place AdamW update.

    Weight decay is decoupled: it shrinks the weights directly and never
    passes through the moment estimates.
    """
    if lr < 0:
        raise ConfigError(f"learning rate must be >= 0, got {lr}")
    b1, b2 = betas
    state.t += 1
    c1 = 1.0 - b1 ** state.t
    c2 = 1.0 - b2 ** state.t
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.data.shape:
            raise NumericError(
                f"gradient shape {g.shape} != parameter shape {p.data.shape} "
                f"for {name!r}"
            )
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient for parameter {name!r}")
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        m_hat = m / c1
        v_hat = v / c2
        if weight_decay:
            p.data *= 1.0 - lr * weight_decay
        p.data -= lr * m_hat / (np.sqrt(v_hat) + eps)


def lr_at(step: int, total_steps: int, base_lr: float, warmup_ratio: float) -> float:
    """Piecewise-linear schedule: ramp to ``base_lr``, then decay to zero.

    The ramp spans ``warmup_ratio * total_steps`` steps; with a zero ratio
    the schedule is pure decay starting at ``base_lr``.
    """
    if not 0.0 <= warmup_ratio < 1.0:
        raise ConfigError(f"warmup ratio must be in [0, 1), got {warmup_ratio}")
    if total_steps <= 0:
        raise ConfigError(f"total steps must be positive, got {total_steps}")
    if not 0 <= step <= total_steps:
        raise ConfigError(f"step {step} outside [0, {total_steps}]")
    warmup = warmup_ratio * total_steps
    if step < warmup:
        return base_lr * step / warmup
    return base_lr * (1.0 - (step - warmup) / (total_steps - warmup))
