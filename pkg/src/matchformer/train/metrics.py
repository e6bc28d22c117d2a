"""Task metrics, computed over masked positions (MPP) or all outputs (NMSP)."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..ingest.types import TEAM_TARGET_STATS
from ..model import HEAD_MPP, HEAD_NMSP, ModelConfig
from ..model.network import embed_batch, encode_batch, mpp_logits_batch, nmsp_predict_batch
from ..numcore import no_grad
from .batches import MppTensors, NmspTensors, batch_slices

EVAL_BATCH = 256


def mpp_forward_logits(params: dict, config: ModelConfig, data: MppTensors, ids):
    x = embed_batch(
        params,
        config,
        data.player_idx[ids],
        data.position_idx[ids],
        data.team_idx[ids],
        data.stats[ids],
    )
    x = encode_batch(params, config, x, data.is_pad[ids])
    return mpp_logits_batch(params, config, x)


def nmsp_forward(params: dict, config: ModelConfig, data: NmspTensors, ids):
    x = embed_batch(
        params,
        config,
        data.player_idx[ids],
        data.position_idx[ids],
        data.team_idx[ids],
        data.stats[ids],
    )
    x = encode_batch(params, config, x, data.is_pad[ids])
    return nmsp_predict_batch(params, config, x)


def mpp_metrics_from_logit_rows(rows: np.ndarray, targets: np.ndarray) -> dict:
    """Cross-entropy and top-1/top-3 hits for masked-position logit rows.

    ``rows`` is [M, V] (one row per masked position), ``targets`` the true
    player index per row. A top-k hit means the target is among the k
    highest logits.
    """
    rows = np.asarray(rows, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.int64)
    m = rows.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(rows - m).sum(axis=-1)) + m[:, 0]
    picked = rows[np.arange(rows.shape[0]), targets]
    k = min(3, rows.shape[1])
    top3 = np.argpartition(-rows, k - 1, axis=-1)[:, :k]
    return {
        "nll_sum": float((lse - picked).sum()),
        "hits1": int((rows.argmax(axis=-1) == targets).sum()),
        "hits3": int((top3 == targets[:, None]).any(axis=1).sum()),
        "count": int(rows.shape[0]),
    }


def evaluate_mpp(params: dict, config: ModelConfig, data: MppTensors,
                 batch_size: int = EVAL_BATCH) -> dict:
    """Cross-entropy and top-1/top-3 accuracy over the masked positions."""
    if config.head != HEAD_MPP:
        raise ConfigError("evaluate_mpp needs a masked-player head")
    nll_sum = 0.0
    hits1 = 0
    hits3 = 0
    total = 0
    with no_grad():
        for ids in batch_slices(len(data), batch_size):
            logits = mpp_forward_logits(params, config, data, ids).data
            mask = data.loss_mask[ids]
            part = mpp_metrics_from_logit_rows(logits[mask], data.targets[ids][mask])
            nll_sum += part["nll_sum"]
            hits1 += part["hits1"]
            hits3 += part["hits3"]
            total += part["count"]
    return {
        "cross_entropy": nll_sum / total,
        "top1": hits1 / total,
        "top3": hits3 / total,
        "n_positions": total,
    }


def evaluate_nmsp(params: dict, config: ModelConfig, data: NmspTensors,
                  batch_size: int = EVAL_BATCH) -> dict:
    """Global MSE plus per-statistic RMSE and dispersion.

    Per-statistic metrics pool the home and away slots of each statistic;
    the dispersion denominator is the mean of the true values over the
    evaluated split (undefined when that mean is not positive).
    """
    if config.head != HEAD_NMSP:
        raise ConfigError("evaluate_nmsp needs a team-statistics head")
    preds = predict_nmsp(params, config, data, batch_size=batch_size)
    return nmsp_metrics_from_predictions(preds, data.target.astype(np.float64))


def predict_nmsp(params: dict, config: ModelConfig, data: NmspTensors,
                 batch_size: int = EVAL_BATCH) -> np.ndarray:
    chunks = []
    with no_grad():
        for ids in batch_slices(len(data), batch_size):
            chunks.append(nmsp_forward(params, config, data, ids).data)
    return np.concatenate(chunks, axis=0).astype(np.float64)


def nmsp_metrics_from_predictions(preds: np.ndarray, targets: np.ndarray) -> dict:
    """Metric block shared by the model and the baseline forecaster."""
    err = preds - targets
    n_stats = targets.shape[1] // 2
    per_stat = []
    for j, name in enumerate(TEAM_TARGET_STATS[:n_stats]):
        pooled_err = np.concatenate([err[:, j], err[:, n_stats + j]])
        pooled_true = np.concatenate([targets[:, j], targets[:, n_stats + j]])
        rmse = float(np.sqrt(np.mean(pooled_err**2)))
        mean_true = float(pooled_true.mean())
        delta = rmse / mean_true if mean_true > 0 else None
        per_stat.append({"stat": name, "rmse": rmse, "delta": delta})
    return {
        "global_mse": float(np.mean(err**2)),
        "per_stat": per_stat,
        "n_examples": int(targets.shape[0]),
    }
