"""The player-sequence transformer.

Each token is the element-wise sum of four D-dimensional parts: a player-id
embedding, a field-position embedding, a team-affiliation embedding (can be
ablated), and a projection of the token's match statistics. The summed
representations pass through a post-norm transformer encoder whose
attention never assigns weight to padding keys, then through either the
per-token masked-player head or the flattened team-statistics head.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, DimensionError
from ..numcore import (
    Tensor,
    add,
    constant,
    embedding_lookup,
    layer_norm,
    linear,
    matmul,
    relu,
    reshape,
    scale,
    softmax,
    transpose,
)
from .config import HEAD_MPP, HEAD_NMSP, ModelConfig

# Large negative logit for masked attention keys; exp() underflows to zero
# after max subtraction, so padding receives exactly no attention weight.
ATTN_MASK_VALUE = -1e9


def _head_layer_shapes(config: ModelConfig) -> list:
    if config.head == HEAD_MPP:
        inp, out = config.dim, config.vocab_size
    else:
        inp, out = config.seq_len * config.dim, 2 * config.n_stats
    if config.mlp_hidden:
        return [("head.w1", (inp, config.dim)), ("head.b1", (config.dim,)),
                ("head.w2", (config.dim, out)), ("head.b2", (out,))]
    return [("head.w1", (inp, out)), ("head.b1", (out,))]


def _stat_mlp_shapes(config: ModelConfig) -> list:
    s, d = config.stat_input_width, config.dim
    if config.mlp_hidden:
        return [("stat_mlp.w1", (s, d)), ("stat_mlp.b1", (d,)),
                ("stat_mlp.w2", (d, d)), ("stat_mlp.b2", (d,))]
    return [("stat_mlp.w1", (s, d)), ("stat_mlp.b1", (d,))]


def _encoder_shapes(config: ModelConfig) -> list:
    d, f = config.dim, config.ff_width
    shapes = []
    for i in range(config.n_layers):
        p = f"enc{i}."
        shapes += [
            (p + "attn_q_w", (d, d)), (p + "attn_q_b", (d,)),
            (p + "attn_k_w", (d, d)), (p + "attn_k_b", (d,)),
            (p + "attn_v_w", (d, d)), (p + "attn_v_b", (d,)),
            (p + "attn_o_w", (d, d)), (p + "attn_o_b", (d,)),
            (p + "ff_w1", (d, f)), (p + "ff_b1", (f,)),
            (p + "ff_w2", (f, d)), (p + "ff_b2", (d,)),
            (p + "ln1_g", (d,)), (p + "ln1_b", (d,)),
            (p + "ln2_g", (d,)), (p + "ln2_b", (d,)),
        ]
    return shapes


def parameter_shapes(config: ModelConfig) -> list:
    """Ordered (name, shape) pairs for every learnable array."""
    shapes = [
        ("player_table", (config.vocab_size, config.dim)),
        ("position_table", (config.n_positions, config.dim)),
        ("team_table", (config.n_teams, config.dim)),
    ]
    shapes += _stat_mlp_shapes(config)
    shapes += _encoder_shapes(config)
    shapes += _head_layer_shapes(config)
    return shapes


def _init_array(rng: np.random.Generator, name: str, shape, dtype) -> np.ndarray:
    if name.endswith(("_b", ".b1", ".b2", "ln1_b", "ln2_b")):
        return np.zeros(shape, dtype=dtype)
    if name.endswith(("ln1_g", "ln2_g")):
        return np.ones(shape, dtype=dtype)
    fan_in = shape[0]
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


def _init_group(rng, shapes, dtype) -> dict:
    return {
        name: Tensor(_init_array(rng, name, shape, dtype), requires_grad=True,
                     name=name)
        for name, shape in shapes
    }


def init_model(config: ModelConfig, seed: int) -> dict:
    """Fresh parameters: uniform(+-1/sqrt(fan_in)) weights, zero biases."""
    rng = np.random.default_rng(seed)
    dtype = np.dtype(config.dtype)
    return _init_group(rng, parameter_shapes(config), dtype)


def param_count(params: dict) -> int:
    return int(sum(p.data.size for p in params.values()))


def _stat_mlp(params: dict, config: ModelConfig, stats: Tensor) -> Tensor:
    h = linear(stats, params["stat_mlp.w1"], params["stat_mlp.b1"])
    if config.mlp_hidden:
        h = linear(relu(h), params["stat_mlp.w2"], params["stat_mlp.b2"])
    return h


def embed_batch(
    params: dict,
    config: ModelConfig,
    player_idx: np.ndarray,
    position_idx: np.ndarray,
    team_idx: np.ndarray,
    stats: np.ndarray,
) -> Tensor:
    """Initial token representations for a batch, shape [B, T, D]."""
    dtype = np.dtype(config.dtype)
    x = add(
        embedding_lookup(params["player_table"], player_idx),
        embedding_lookup(params["position_table"], position_idx),
    )
    if config.use_team_embeddings:
        x = add(x, embedding_lookup(params["team_table"], team_idx))
    x = add(x, _stat_mlp(params, config, constant(stats, dtype=dtype)))
    return x


def encode_batch(
    params: dict,
    config: ModelConfig,
    x: Tensor,
    is_pad: np.ndarray,
    attn_out: list | None = None,
) -> Tensor:
    """Run the encoder stack; [B, T, D] in, [B, T, D] out.

    ``is_pad`` is a [B, T] boolean; attention logits toward padded keys are
    pushed to -inf so padding never contributes to any real token. When
    ``attn_out`` is a list, each layer's attention array [B, H, T, T] is
    appended to it.
    """
    b, t, d = x.data.shape
    if d != config.dim:
        raise DimensionError(f"input width {d} != model dim {config.dim}")
    h, hd = config.n_heads, config.head_dim
    dtype = np.dtype(config.dtype)
    mask = np.where(is_pad, ATTN_MASK_VALUE, 0.0).astype(dtype)
    mask = mask.reshape(b, 1, 1, t)
    mask_t = constant(mask)

    for i in range(config.n_layers):
        p = f"enc{i}."

        def heads(name):
            proj = linear(x, params[p + f"attn_{name}_w"], params[p + f"attn_{name}_b"])
            return transpose(reshape(proj, (b, t, h, hd)), (0, 2, 1, 3))

        q, k, v = heads("q"), heads("k"), heads("v")
        logits = scale(matmul(q, transpose(k, (0, 1, 3, 2))), 1.0 / np.sqrt(hd))
        weights = softmax(add(logits, mask_t))
        if attn_out is not None:
            attn_out.append(weights.data)
        ctx = reshape(transpose(matmul(weights, v), (0, 2, 1, 3)), (b, t, d))
        attended = linear(ctx, params[p + "attn_o_w"], params[p + "attn_o_b"])
        x = layer_norm(add(x, attended), params[p + "ln1_g"], params[p + "ln1_b"])
        ff = linear(relu(linear(x, params[p + "ff_w1"], params[p + "ff_b1"])),
                    params[p + "ff_w2"], params[p + "ff_b2"])
        x = layer_norm(add(x, ff), params[p + "ln2_g"], params[p + "ln2_b"])
    return x


def mpp_logits_batch(params: dict, config: ModelConfig, x: Tensor) -> Tensor:
    """Per-token vocabulary logits, [B, T, V]."""
    if config.head != HEAD_MPP:
        raise ConfigError(f"model head is {config.head!r}, expected {HEAD_MPP!r}")
    h = linear(x, params["head.w1"], params["head.b1"])
    if config.mlp_hidden:
        h = linear(relu(h), params["head.w2"], params["head.b2"])
    return h


def nmsp_predict_batch(params: dict, config: ModelConfig, x: Tensor) -> Tensor:
    """Team-statistics predictions, [B, 2 * n_stats]."""
    if config.head != HEAD_NMSP:
        raise ConfigError(f"model head is {config.head!r}, expected {HEAD_NMSP!r}")
    b = x.data.shape[0]
    flat = reshape(x, (b, config.seq_len * config.dim))
    h = linear(flat, params["head.w1"], params["head.b1"])
    if config.mlp_hidden:
        h = linear(relu(h), params["head.w2"], params["head.b2"])
    return h


# ---------------------------------------------------------------------------
# single-match conveniences (batch of one)


def embed_inputs(params: dict, tm, config: ModelConfig) -> np.ndarray:
    """Initial representations [seq_len, D] for one tokenized match."""
    out = embed_batch(
        params,
        config,
        tm.player_idx[None, :],
        tm.position_idx[None, :],
        tm.team_idx[None, :],
        tm.stats[None, :, :],
    )
    return out.data[0]


def encode(params: dict, x_init: np.ndarray, pad_mask: np.ndarray,
           config: ModelConfig) -> np.ndarray:
    """Contextualized representations [seq_len, D] for one match."""
    x = constant(x_init[None, :, :], dtype=np.dtype(config.dtype))
    out = encode_batch(params, config, x, np.asarray(pad_mask)[None, :])
    return out.data[0]


def mpp_logits(params: dict, x_out: np.ndarray, config: ModelConfig) -> np.ndarray:
    out = mpp_logits_batch(
        params, config, constant(x_out[None, :, :], dtype=np.dtype(config.dtype))
    )
    return out.data[0]


def nmsp_predict(params: dict, x_out: np.ndarray, config: ModelConfig) -> np.ndarray:
    out = nmsp_predict_batch(
        params, config, constant(x_out[None, :, :], dtype=np.dtype(config.dtype))
    )
    return out.data[0]


def swap_head_for_nmsp(
    params: dict,
    config: ModelConfig,
    seed: int,
    new_stat_width: int = 234,
) -> tuple:
    """Reuse a pre-trained backbone for team-statistics prediction.

    Embedding tables and encoder weights are copied verbatim; the input
    projection is re-initialized at the new statistics width and the head is
    replaced. Everything stays trainable.
    """
    if config.head != HEAD_MPP:
        raise ConfigError("can only swap the head of a masked-player model")
    new_config = ModelConfig(
        n_layers=config.n_layers,
        dim=config.dim,
        vocab_size=config.vocab_size,
        n_positions=config.n_positions,
        n_teams=config.n_teams,
        stat_input_width=new_stat_width,
        n_heads=config.n_heads,
        ff_width=config.ff_width,
        use_team_embeddings=config.use_team_embeddings,
        head=HEAD_NMSP,
        n_stats=config.n_stats,
        seq_len=config.seq_len,
        mlp_hidden=config.mlp_hidden,
        dtype=config.dtype,
    )
    rng = np.random.default_rng(seed)
    dtype = np.dtype(new_config.dtype)
    fresh = _init_group(
        rng, _stat_mlp_shapes(new_config) + _head_layer_shapes(new_config), dtype
    )
    new_params = {}
    for name, shape in parameter_shapes(new_config):
        if name in fresh:
            new_params[name] = fresh[name]
        else:
            old = params[name]
            if old.data.shape != shape:
                raise ConfigError(
                    f"backbone parameter {name} has shape {old.data.shape}, "
                    f"expected {shape}"
                )
            new_params[name] = Tensor(old.data.copy(), requires_grad=True, name=name)
    return new_params, new_config
