"""Corpus tensorization: samples packed into flat arrays for batched steps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import IntegrityError


@dataclass(eq=False)
class MppTensors:
    """A masked-player corpus as contiguous arrays.

    ``player_idx`` already has the MASK id substituted at masked positions;
    ``targets`` holds the true player ids there (zero elsewhere) and
    ``loss_mask`` marks exactly the masked positions.
    """

    player_idx: np.ndarray  # [N, T] int32, MASK substituted
    position_idx: np.ndarray  # [N, T] int32
    team_idx: np.ndarray  # [N, T] int32
    stats: np.ndarray  # [N, T, S]
    is_pad: np.ndarray  # [N, T] bool
    loss_mask: np.ndarray  # [N, T] bool
    targets: np.ndarray  # [N, T] int64

    def __len__(self) -> int:
        return self.player_idx.shape[0]


def mpp_tensors(samples, mask_index: int, dtype=np.float32) -> MppTensors:
    samples = list(samples)
    if not samples:
        raise IntegrityError("empty masked-player corpus")
    t = samples[0].base.seq_len
    s = samples[0].base.stat_width
    n = len(samples)
    player_idx = np.zeros((n, t), dtype=np.int32)
    position_idx = np.zeros((n, t), dtype=np.int32)
    team_idx = np.zeros((n, t), dtype=np.int32)
    stats = np.zeros((n, t, s), dtype=dtype)
    is_pad = np.zeros((n, t), dtype=bool)
    loss_mask = np.zeros((n, t), dtype=bool)
    targets = np.zeros((n, t), dtype=np.int64)
    for i, sample in enumerate(samples):
        if sample.masked_positions.size == 0:
            raise IntegrityError(
                f"sample of match {sample.match_id} has no masked positions"
            )
        base = sample.base
        player_idx[i] = sample.masked_player_idx(mask_index)
        position_idx[i] = base.position_idx
        team_idx[i] = base.team_idx
        stats[i] = base.stats.astype(dtype)
        is_pad[i] = base.is_pad
        loss_mask[i, sample.masked_positions] = True
        targets[i, sample.masked_positions] = sample.targets
        if np.any(base.is_pad[sample.masked_positions]):
            raise IntegrityError(
                f"sample of match {sample.match_id} masks a padding token"
            )
    return MppTensors(player_idx, position_idx, team_idx, stats, is_pad,
                      loss_mask, targets)


@dataclass(eq=False)
class NmspTensors:
    player_idx: np.ndarray
    position_idx: np.ndarray
    team_idx: np.ndarray
    stats: np.ndarray  # [N, T, 234]
    is_pad: np.ndarray
    target: np.ndarray  # [N, 36]

    def __len__(self) -> int:
        return self.player_idx.shape[0]


def nmsp_tensors(examples, dtype=np.float32) -> NmspTensors:
    examples = list(examples)
    if not examples:
        raise IntegrityError("empty next-match dataset")
    t = examples[0].tokens.seq_len
    s = examples[0].tokens.stat_width
    width = examples[0].target.shape[0]
    n = len(examples)
    player_idx = np.zeros((n, t), dtype=np.int32)
    position_idx = np.zeros((n, t), dtype=np.int32)
    team_idx = np.zeros((n, t), dtype=np.int32)
    stats = np.zeros((n, t, s), dtype=dtype)
    is_pad = np.zeros((n, t), dtype=bool)
    target = np.zeros((n, width), dtype=dtype)
    for i, ex in enumerate(examples):
        tk = ex.tokens
        player_idx[i] = tk.player_idx
        position_idx[i] = tk.position_idx
        team_idx[i] = tk.team_idx
        stats[i] = tk.stats.astype(dtype)
        is_pad[i] = tk.is_pad
        target[i] = ex.target.astype(dtype)
    return NmspTensors(player_idx, position_idx, team_idx, stats, is_pad, target)


def batch_slices(n: int, batch_size: int, order=None):
    """Yield index arrays of at most ``batch_size`` covering ``range(n)``."""
    if order is None:
        order = np.arange(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]
