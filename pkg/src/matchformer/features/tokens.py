"""Matches as fixed-length token sequences, plus masking augmentation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import CapacityError, ConfigError, IntegrityError
from ..seeding import derive_seed
from .vocab import Vocabulary

SEQ_LEN = 80


@dataclass(eq=False)
class TokenizedMatch:
    """One match as a padded sequence of player tokens.

    Index arrays have length ``seq_len``; ``stats`` is ``[seq_len, width]``.
    Tokens ``0..n_real-1`` are the home squad followed by the away squad in
    sheet order; the rest are padding with zero statistics.
    """

    match_id: str
    kickoff_order: int
    player_idx: np.ndarray
    position_idx: np.ndarray
    team_idx: np.ndarray
    stats: np.ndarray
    is_pad: np.ndarray
    n_real: int

    @property
    def seq_len(self) -> int:
        return len(self.player_idx)

    @property
    def stat_width(self) -> int:
        return self.stats.shape[1]


@dataclass(eq=False)
class MaskedMatch:
    """A tokenized match plus one sampled set of masked token positions."""

    base: TokenizedMatch
    masked_positions: np.ndarray  # sorted indices into the real tokens
    targets: np.ndarray  # true player indices at the masked positions

    @property
    def match_id(self) -> str:
        return self.base.match_id

    def masked_player_idx(self, mask_index: int) -> np.ndarray:
        out = self.base.player_idx.copy()
        out[self.masked_positions] = mask_index
        return out


def mask_count(mask_rate: float, n_real: int) -> int:
    """Number of tokens to mask: round-half-up with a floor of one."""
    return max(1, int(np.floor(mask_rate * n_real + 0.5)))


def tokenize(rows, vocab: Vocabulary, seq_len: int = SEQ_LEN) -> TokenizedMatch:
    """Turn one match's stat rows (in sheet order) into a token sequence."""
    rows = list(rows)
    if not rows:
        raise IntegrityError("cannot tokenize a match with no rows")
    if len(rows) > seq_len:
        raise CapacityError(
            f"match {rows[0].match_id} has {len(rows)} squad players, "
            f"exceeding the sequence capacity of {seq_len}"
        )
    match_ids = {r.match_id for r in rows}
    if len(match_ids) != 1:
        raise IntegrityError(f"rows span multiple matches: {sorted(match_ids)}")

    n_real = len(rows)
    width = rows[0].stats.shape[0]
    player_idx = np.full(seq_len, vocab.pad_index, dtype=np.int32)
    position_idx = np.full(seq_len, vocab.position_pad_index, dtype=np.int32)
    team_idx = np.full(seq_len, vocab.team_pad_index, dtype=np.int32)
    stats = np.zeros((seq_len, width), dtype=np.float64)
    is_pad = np.ones(seq_len, dtype=bool)
    for i, row in enumerate(rows):
        player_idx[i] = vocab.player_index(row.player_id)
        position_idx[i] = vocab.position_index(row.position_id)
        team_idx[i] = vocab.team_index(row.team_id)
        stats[i] = row.stats
        is_pad[i] = False
    return TokenizedMatch(
        match_id=rows[0].match_id,
        kickoff_order=rows[0].kickoff_order,
        player_idx=player_idx,
        position_idx=position_idx,
        team_idx=team_idx,
        stats=stats,
        is_pad=is_pad,
        n_real=n_real,
    )


def augment_mpp(
    tm: TokenizedMatch, k: int, mask_rate: float, seed: int
) -> list[MaskedMatch]:
    """Sample ``k`` independently masked variants of one tokenized match.

    Sampling is keyed by ``(seed, match_id, variant)`` so results do not
    depend on processing order. Padding is never masked.
    """
    if k < 1:
        raise ConfigError(f"augmentation count must be >= 1, got {k}")
    if not 0.0 < mask_rate < 1.0:
        raise ConfigError(f"mask rate must be in (0, 1), got {mask_rate}")
    n_mask = mask_count(mask_rate, tm.n_real)
    out = []
    for variant in range(k):
        rng = np.random.default_rng(derive_seed(seed, "mpp-mask", tm.match_id, variant))
        positions = np.sort(rng.choice(tm.n_real, size=n_mask, replace=False))
        positions = positions.astype(np.int64)
        out.append(
            MaskedMatch(
                base=tm,
                masked_positions=positions,
                targets=tm.player_idx[positions].copy(),
            )
        )
    return out
