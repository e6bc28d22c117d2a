"""Core data model for event ingestion.

The 39-statistic canonical order and the 25 position codes defined here are
part of the artifact contract; see docs/stat_mapping.md for the full
statistic -> event predicate table.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import IntegrityError

# Canonical 39-statistic order. Grouped: passing (10), shooting (10),
# interceptions (3), dribbles (3), fouls (6), goalkeeping (3), other (4).
STAT_NAMES = (
    "pass_total",
    "pass_cross",
    "pass_cut_back",
    "pass_shot_assist",
    "pass_goal_assist",
    "pass_no_touch",
    "pass_interception",
    "pass_incomplete",
    "pass_offside",
    "pass_through_ball",
    "shot_total",
    "shot_statsbomb_xg",
    "shot_corner",
    "shot_free_kick",
    "shot_open_play",
    "shot_penalty",
    "shot_saved",
    "shot_off_target",
    "shot_blocked",
    "shot_goal",
    "interception_total",
    "interception_won",
    "interception_lost",
    "dribble_total",
    "dribble_complete",
    "dribble_incomplete",
    "foul_won_total",
    "foul_won_penalty",
    "foul_committed_total",
    "foul_committed_penalty",
    "foul_committed_yellow_card",
    "foul_committed_red_card",
    "goalkeeper_goal_conceded",
    "goalkeeper_save",
    "goalkeeper_shot_faced",
    "block_total",
    "clearance_total",
    "ball_recovery_total",
    "counterpress_total",
)

N_STATS = len(STAT_NAMES)
STAT_INDEX = {name: i for i, name in enumerate(STAT_NAMES)}

# The 18 team-level statistics predicted by the next-match task, in report
# order. Each name refers to an entry of STAT_NAMES; team values are sums
# over the squad.
TEAM_TARGET_STATS = (
    "pass_total",
    "pass_cross",
    "pass_shot_assist",
    "pass_goal_assist",
    "pass_through_ball",
    "shot_total",
    "shot_statsbomb_xg",
    "shot_goal",
    "interception_won",
    "block_total",
    "clearance_total",
    "ball_recovery_total",
    "counterpress_total",
    "dribble_complete",
    "foul_won_total",
    "foul_committed_total",
    "goalkeeper_save",
    "goalkeeper_shot_faced",
)

TEAM_TARGET_INDICES = tuple(STAT_INDEX[s] for s in TEAM_TARGET_STATS)
N_TEAM_STATS = len(TEAM_TARGET_STATS)

# The 25 on-pitch position codes, plus a reserved code for squad players
# whose position is never recorded (e.g. unused substitutes).
POSITION_CODES = (
    "GK",
    "RB",
    "RCB",
    "CB",
    "LCB",
    "LB",
    "RWB",
    "LWB",
    "RDM",
    "CDM",
    "LDM",
    "RM",
    "RCM",
    "CM",
    "LCM",
    "LM",
    "RW",
    "RAM",
    "CAM",
    "LAM",
    "LW",
    "RCF",
    "ST",
    "LCF",
    "SS",
)
UNKNOWN_POSITION = "UNK"


class EventType(Enum):
    PASS = "Pass"
    SHOT = "Shot"
    INTERCEPTION = "Interception"
    DRIBBLE = "Dribble"
    FOUL_WON = "FoulWon"
    FOUL_COMMITTED = "FoulCommitted"
    GOALKEEPER_ACTION = "GoalkeeperAction"
    BLOCK = "Block"
    CLEARANCE = "Clearance"
    BALL_RECOVERY = "BallRecovery"
    COUNTERPRESS_TAG = "CounterpressTag"


@dataclass
class NormalizedEvent:
    """One on-ball action in source-independent form.

    ``attributes`` holds the boolean/numeric qualifiers the statistic
    mapping consumes; ``xg`` is present exactly for shots.
    """

    match_id: str
    event_type: EventType
    player_id: str
    team_id: str
    attributes: dict = field(default_factory=dict)
    xg: float | None = None

    def __post_init__(self):
        if self.event_type is EventType.SHOT:
            if self.xg is None:
                self.xg = 0.0
        elif self.xg is not None:
            raise IntegrityError(
                f"xg given for non-shot event type {self.event_type.value}"
            )


@dataclass
class ParseResult:
    """Events parsed from one file plus the count of dropped raw records."""

    events: list
    dropped: int = 0

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)


@dataclass
class SheetEntry:
    player_id: str
    team_id: str
    position_id: str
    participated: bool


@dataclass
class MatchSheet:
    """Both squads of one match; entries are home squad first, then away."""

    match_id: str
    kickoff_date: datetime.date | None
    league_id: str
    home_team_id: str
    away_team_id: str
    entries: list

    def validate(self):
        seen = set()
        for e in self.entries:
            if e.player_id in seen:
                raise IntegrityError(
                    f"player {e.player_id} appears twice in match {self.match_id}"
                )
            seen.add(e.player_id)
            if e.team_id not in (self.home_team_id, self.away_team_id):
                raise IntegrityError(
                    f"entry team {e.team_id} is neither squad of match {self.match_id}"
                )
        return self

    def __eq__(self, other):
        if not isinstance(other, MatchSheet):
            return NotImplemented
        return (
            self.match_id == other.match_id
            and self.kickoff_date == other.kickoff_date
            and self.league_id == other.league_id
            and self.home_team_id == other.home_team_id
            and self.away_team_id == other.away_team_id
            and self.entries == other.entries
        )


@dataclass(eq=False)
class PlayerMatchStats:
    """One player's 39 match statistics plus identity fields."""

    match_id: str
    player_id: str
    team_id: str
    position_id: str
    participated: bool
    kickoff_order: int
    stats: np.ndarray  # shape (39,), float64, all entries >= 0
    kickoff_date: datetime.date | None = None
    league_id: str = ""

    def __post_init__(self):
        self.stats = np.asarray(self.stats, dtype=np.float64)
        if self.stats.shape != (N_STATS,):
            raise IntegrityError(
                f"stat vector for {self.player_id} has shape {self.stats.shape}, "
                f"expected ({N_STATS},)"
            )

    def stat(self, name: str) -> float:
        return float(self.stats[STAT_INDEX[name]])

    def __eq__(self, other):
        if not isinstance(other, PlayerMatchStats):
            return NotImplemented
        return (
            self.match_id == other.match_id
            and self.player_id == other.player_id
            and self.team_id == other.team_id
            and self.position_id == other.position_id
            and self.participated == other.participated
            and self.kickoff_order == other.kickoff_order
            and self.kickoff_date == other.kickoff_date
            and self.league_id == other.league_id
            and np.array_equal(self.stats, other.stats)
        )
