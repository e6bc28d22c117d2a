"""Token vocabulary: players, teams and positions get dense stable indices.

Player index space reserves two trailing ids: MASK (= number of players)
and PAD (= number of players + 1). Position and team spaces each reserve a
single trailing PAD row used for padding tokens.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import ConfigError, IntegrityError
from ..ingest.types import POSITION_CODES

FORMAT_NAME = "vocabulary"
FORMAT_VERSION = 1


@dataclass
class Vocabulary:
    player_ids: list
    team_ids: list
    position_ids: list

    def __post_init__(self):
        self._player_index = {p: i for i, p in enumerate(self.player_ids)}
        self._team_index = {t: i for i, t in enumerate(self.team_ids)}
        self._position_index = {p: i for i, p in enumerate(self.position_ids)}
        if len(self._player_index) != len(self.player_ids):
            raise IntegrityError("duplicate player ids in vocabulary")

    # -- player space -------------------------------------------------
    @property
    def n_players(self) -> int:
        return len(self.player_ids)

    @property
    def mask_index(self) -> int:
        return self.n_players

    @property
    def pad_index(self) -> int:
        return self.n_players + 1

    @property
    def total_size(self) -> int:
        return self.n_players + 2

    def player_index(self, player_id) -> int:
        try:
            return self._player_index[player_id]
        except KeyError:
            raise IntegrityError(f"player {player_id!r} not in vocabulary") from None

    def player_id(self, index: int):
        return self.player_ids[index]

    # -- team space ---------------------------------------------------
    @property
    def team_pad_index(self) -> int:
        return len(self.team_ids)

    @property
    def n_team_rows(self) -> int:
        return len(self.team_ids) + 1

    def team_index(self, team_id) -> int:
        try:
            return self._team_index[team_id]
        except KeyError:
            raise IntegrityError(f"team {team_id!r} not in vocabulary") from None

    # -- position space -------------------------------------------------
    @property
    def position_pad_index(self) -> int:
        return len(self.position_ids)

    @property
    def n_position_rows(self) -> int:
        return len(self.position_ids) + 1

    def position_index(self, position_id) -> int:
        try:
            return self._position_index[position_id]
        except KeyError:
            raise IntegrityError(
                f"position {position_id!r} not in vocabulary"
            ) from None


def build_vocabulary(rows) -> Vocabulary:
    """Collect every distinct player, team and position from dataset rows.

    Player and team ids are sorted; positions keep the canonical on-pitch
    order with any extra codes appended afterwards.
    """
    rows = list(rows)
    if not rows:
        raise ConfigError("cannot build a vocabulary from an empty dataset")
    players = sorted({r.player_id for r in rows})
    teams = sorted({r.team_id for r in rows})
    present = {r.position_id for r in rows}
    positions = [p for p in POSITION_CODES if p in present]
    positions += sorted(present.difference(POSITION_CODES))
    return Vocabulary(player_ids=players, team_ids=teams, position_ids=positions)


def save_vocabulary(vocab: Vocabulary, path) -> None:
    payload = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "players": list(vocab.player_ids),
        "teams": list(vocab.team_ids),
        "positions": list(vocab.position_ids),
        "mask_index": vocab.mask_index,
        "pad_index": vocab.pad_index,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_vocabulary(path) -> Vocabulary:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != FORMAT_NAME:
        raise IntegrityError(f"{path}: not a vocabulary file")
    vocab = Vocabulary(
        player_ids=payload["players"],
        team_ids=payload["teams"],
        position_ids=payload["positions"],
    )
    if payload["mask_index"] != vocab.mask_index:
        raise IntegrityError(f"{path}: inconsistent mask index")
    return vocab
