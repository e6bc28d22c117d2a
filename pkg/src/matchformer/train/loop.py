"""Pre-training and fine-tuning loops.

Both tasks share the same skeleton: per-epoch reshuffling with seeds
derived from the run seed, a linear warmup/decay schedule, AdamW updates,
and periodic evaluation on the validation split. Runs are bit-reproducible
for a fixed (corpus, config, seed) in single-threaded execution.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError, NumericError
from ..model import (
    HEAD_MPP,
    HEAD_NMSP,
    ModelConfig,
    init_model,
    load_checkpoint,
    save_checkpoint,
    swap_head_for_nmsp,
)
from ..numcore import AdamWState, adamw_step, backward, collect_grads, cross_entropy, lr_at, mse_mean
from ..seeding import rng_for
from .batches import batch_slices, mpp_tensors, nmsp_tensors
from .metrics import evaluate_mpp, evaluate_nmsp, mpp_forward_logits, nmsp_forward


@dataclass
class TrainConfig:
    model: ModelConfig
    batch_size: int = 256
    base_lr: float = 1e-4
    warmup_ratio: float = 0.0
    weight_decay: float = 0.0
    epochs: int | None = None
    total_steps: int | None = None
    seed: int = 0
    task: str = "mpp"
    init_checkpoint: str | None = None
    eval_every_epochs: int = 1

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError(f"batch size must be >= 1, got {self.batch_size}")
        if (self.epochs is None) == (self.total_steps is None):
            raise ConfigError("set exactly one of epochs / total_steps")
        if self.task not in (HEAD_MPP, HEAD_NMSP):
            raise ConfigError(f"unknown task {self.task!r}")

    def schedule(self, n_train: int) -> tuple:
        """(steps_per_epoch, epochs, total_steps) for a training-set size."""
        steps_per_epoch = math.ceil(n_train / self.batch_size)
        if self.epochs is not None:
            return steps_per_epoch, self.epochs, steps_per_epoch * self.epochs
        epochs = math.ceil(self.total_steps / steps_per_epoch)
        return steps_per_epoch, epochs, self.total_steps


@dataclass
class RunReport:
    """Metric log of one training run."""

    task: str
    records: list = field(default_factory=list)
    wall_time_s: float = 0.0
    checkpoint_path: str | None = None
    total_steps: int = 0
    final: dict = field(default_factory=dict)

    def append(self, record: dict) -> None:
        for value in record.values():
            if isinstance(value, float) and not np.isfinite(value):
                raise NumericError(f"non-finite metric in record: {record}")
        if self.records and record["step"] <= self.records[-1]["step"]:
            raise NumericError("metric records must have increasing steps")
        self.records.append(record)


def _loss_value(loss) -> float:
    value = float(loss.data)
    if not np.isfinite(value):
        raise NumericError(
            f"training loss became non-finite ({value}); aborting"
        )
    return value


def _train(
    config: TrainConfig,
    params: dict,
    train_data,
    val_data,
    step_fn,
    eval_fn,
    run_dir=None,
) -> tuple:
    n_train = len(train_data)
    steps_per_epoch, epochs, total_steps = config.schedule(n_train)
    state = AdamWState.for_params(params)
    report = RunReport(task=config.task, total_steps=total_steps)
    started = time.perf_counter()
    step = 0
    for epoch in range(epochs):
        if step >= total_steps:
            break
        order = rng_for(config.seed, "shuffle", epoch).permutation(n_train)
        epoch_losses = []
        for ids in batch_slices(n_train, config.batch_size, order):
            if step >= total_steps:
                break
            lr = lr_at(step, total_steps, config.base_lr, config.warmup_ratio)
            loss = step_fn(ids)
            epoch_losses.append(_loss_value(loss))
            backward(loss)
            adamw_step(
                params,
                collect_grads(params),
                state,
                lr=lr,
                weight_decay=config.weight_decay,
            )
            step += 1
        last_epoch = step >= total_steps
        if (epoch + 1) % config.eval_every_epochs == 0 or last_epoch:
            record = {
                "step": step,
                "epoch": epoch + 1,
                "train_loss": float(np.mean(epoch_losses)),
                "lr": lr_at(min(step, total_steps), total_steps,
                            config.base_lr, config.warmup_ratio),
            }
            record.update(eval_fn())
            report.append(record)
    report.wall_time_s = time.perf_counter() - started
    report.final = dict(report.records[-1]) if report.records else {}
    if run_dir is not None:
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        ckpt = run_dir / "checkpoint"
        save_checkpoint(params, config.model, ckpt)
        report.checkpoint_path = str(ckpt)
        write_metrics_log(report, run_dir / "metrics.jsonl")
    return params, report


def pretrain_mpp(corpus, config: TrainConfig, run_dir=None) -> tuple:
    """Train masked-player prediction on ``corpus = (train, val)`` samples.

    Returns ``(params, report)``; a checkpoint and metric log are written
    under ``run_dir`` when given.
    """
    if config.task != HEAD_MPP or config.model.head != HEAD_MPP:
        raise ConfigError("pretrain_mpp needs task and model head 'mpp'")
    train_samples, val_samples = corpus
    if not train_samples:
        raise ConfigError("empty pre-training corpus")
    mask_index = config.model.vocab_size - 2
    dtype = np.dtype(config.model.dtype)
    train_data = mpp_tensors(train_samples, mask_index, dtype)
    val_data = mpp_tensors(val_samples, mask_index, dtype) if val_samples else None
    _check_corpus(config.model, train_data)
    params = init_model(config.model, config.seed)

    def step_fn(ids):
        logits = mpp_forward_logits(params, config.model, train_data, ids)
        b, t, v = logits.data.shape
        from ..numcore import reshape

        flat = reshape(logits, (b * t, v))
        return cross_entropy(
            flat,
            train_data.targets[ids].reshape(-1),
            train_data.loss_mask[ids].reshape(-1),
        )

    def eval_fn():
        if val_data is None:
            return {}
        scores = evaluate_mpp(params, config.model, val_data)
        return {
            "val_loss": scores["cross_entropy"],
            "val_top1": scores["top1"],
            "val_top3": scores["top3"],
        }

    return _train(config, params, train_data, val_data, step_fn, eval_fn, run_dir)


def _check_corpus(model_config: ModelConfig, data) -> None:
    seq_len = data.player_idx.shape[1]
    if seq_len != model_config.seq_len:
        raise ConfigError(
            f"corpus sequence length {seq_len} != model sequence length "
            f"{model_config.seq_len}"
        )
    width = data.stats.shape[2]
    if width != model_config.stat_input_width:
        raise ConfigError(
            f"corpus statistic width {width} != model input width "
            f"{model_config.stat_input_width}"
        )
    if int(data.player_idx.max()) >= model_config.vocab_size:
        raise ConfigError("corpus player index exceeds model vocabulary")


def _init_nmsp_params(config: TrainConfig, pretrained=None) -> dict:
    if pretrained is None and config.init_checkpoint is None:
        return init_model(config.model, config.seed)
    if pretrained is None:
        pretrained = load_checkpoint(config.init_checkpoint)
    backbone_params, backbone_config = pretrained
    swapped, swapped_config = swap_head_for_nmsp(
        backbone_params,
        backbone_config,
        seed=config.seed,
        new_stat_width=config.model.stat_input_width,
    )
    for field_name in ("n_layers", "dim", "n_heads", "ff_width", "vocab_size",
                       "n_positions", "n_teams", "seq_len", "use_team_embeddings",
                       "mlp_hidden", "dtype"):
        want = getattr(config.model, field_name)
        got = getattr(swapped_config, field_name)
        if want != got:
            raise ConfigError(
                f"checkpoint/architecture mismatch on {field_name}: "
                f"checkpoint gives {got}, config wants {want}"
            )
    return swapped


def finetune_nmsp(dataset, config: TrainConfig, run_dir=None, pretrained=None,
                  initial_params=None) -> tuple:
    """Train team-statistics prediction on ``dataset = (train, val)``.

    Initialization is random, from ``config.init_checkpoint``, or from an
    in-memory ``pretrained=(params, config)`` backbone; in the checkpoint
    cases the head is swapped and the input projection re-initialized, and
    every weight remains trainable. ``initial_params`` overrides all of
    that with explicit starting weights (paired-initialization studies).
    """
    if config.task != HEAD_NMSP or config.model.head != HEAD_NMSP:
        raise ConfigError("finetune_nmsp needs task and model head 'nmsp'")
    train_examples, val_examples = dataset
    if not train_examples:
        raise ConfigError("empty fine-tuning dataset")
    dtype = np.dtype(config.model.dtype)
    train_data = nmsp_tensors(train_examples, dtype)
    val_data = nmsp_tensors(val_examples, dtype) if val_examples else None
    _check_corpus(config.model, train_data)
    if initial_params is not None:
        from ..numcore import Tensor

        params = {
            name: Tensor(p.data.copy(), requires_grad=True, name=name)
            for name, p in initial_params.items()
        }
    else:
        params = _init_nmsp_params(config, pretrained)

    def step_fn(ids):
        preds = nmsp_forward(params, config.model, train_data, ids)
        return mse_mean(preds, train_data.target[ids])

    def eval_fn():
        if val_data is None:
            return {}
        scores = evaluate_nmsp(params, config.model, val_data)
        return {"val_global_mse": scores["global_mse"]}

    return _train(config, params, train_data, val_data, step_fn, eval_fn, run_dir)


def write_metrics_log(report: RunReport, path) -> None:
    """Line-delimited metric records plus a final summary record.

    Deliberately contains no wall-clock fields so reruns with identical
    inputs produce byte-identical logs; timing lives in the run manifest.
    """
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for record in report.records:
            fh.write(json.dumps({"type": "record", **record}) + "\n")
        summary = {
            "type": "summary",
            "task": report.task,
            "total_steps": report.total_steps,
            **{f"final_{k}": v for k, v in report.final.items()},
        }
        fh.write(json.dumps(summary) + "\n")
