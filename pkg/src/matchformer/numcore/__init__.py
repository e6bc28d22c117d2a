"""Minimal dense-tensor numeric core with reverse-mode autodiff."""

from .autodiff import (
    Tensor,
    add,
    backward,
    collect_grads,
    constant,
    cross_entropy,
    embedding_lookup,
    flatten,
    graph_nodes,
    layer_norm,
    linear,
    matmul,
    mean_all,
    mse_mean,
    mul,
    no_grad,
    parameter,
    relu,
    reshape,
    scale,
    softmax,
    sum_all,
    transpose,
)
from .optim import AdamWState, adamw_step, lr_at

__all__ = [
    "AdamWState",
    "Tensor",
    "add",
    "adamw_step",
    "backward",
    "collect_grads",
    "constant",
    "cross_entropy",
    "embedding_lookup",
    "flatten",
    "graph_nodes",
    "layer_norm",
    "linear",
    "lr_at",
    "matmul",
    "mean_all",
    "mse_mean",
    "mul",
    "no_grad",
    "parameter",
    "relu",
    "reshape",
    "scale",
    "softmax",
    "sum_all",
    "transpose",
]
