"""Model architecture, forward passes and checkpointing."""

from .checkpoint import load_checkpoint, save_checkpoint
from .config import HEAD_MPP, HEAD_NMSP, ModelConfig, config_from_vocab
from .network import (
    ATTN_MASK_VALUE,
    embed_batch,
    embed_inputs,
    encode,
    encode_batch,
    init_model,
    mpp_logits,
    mpp_logits_batch,
    nmsp_predict,
    nmsp_predict_batch,
    param_count,
    parameter_shapes,
    swap_head_for_nmsp,
)

__all__ = [
    "ATTN_MASK_VALUE",
    "HEAD_MPP",
    "HEAD_NMSP",
    "ModelConfig",
    "config_from_vocab",
    "embed_batch",
    "embed_inputs",
    "encode",
    "encode_batch",
    "init_model",
    "load_checkpoint",
    "mpp_logits",
    "mpp_logits_batch",
    "nmsp_predict",
    "nmsp_predict_batch",
    "param_count",
    "parameter_shapes",
    "save_checkpoint",
    "swap_head_for_nmsp",
]
