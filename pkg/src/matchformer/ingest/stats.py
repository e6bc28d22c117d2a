"""Event -> player-statistics aggregation.

The statistic mapping below is the executable form of the contract in
docs/stat_mapping.md: each normalized event contributes to a fixed set of
counters determined by its type and attribute flags.
"""

from __future__ import annotations

from collections import Counter, defaultdict

import numpy as np

from ..errors import IntegrityError
from .types import (
    N_STATS,
    STAT_INDEX,
    UNKNOWN_POSITION,
    EventType,
    MatchSheet,
    NormalizedEvent,
    PlayerMatchStats,
)

_PASS_FLAG_STATS = (
    ("cross", "pass_cross"),
    ("cut_back", "pass_cut_back"),
    ("shot_assist", "pass_shot_assist"),
    ("goal_assist", "pass_goal_assist"),
    ("no_touch", "pass_no_touch"),
    ("intercepted", "pass_interception"),
    ("incomplete", "pass_incomplete"),
    ("offside", "pass_offside"),
    ("through_ball", "pass_through_ball"),
)

_SHOT_FLAG_STATS = (
    ("corner", "shot_corner"),
    ("free_kick", "shot_free_kick"),
    ("open_play", "shot_open_play"),
    ("penalty", "shot_penalty"),
    ("saved", "shot_saved"),
    ("off_target", "shot_off_target"),
    ("blocked", "shot_blocked"),
    ("goal", "shot_goal"),
)


def event_contributions(event: NormalizedEvent):
    """Yield ``(stat_index, amount)`` pairs for one normalized event."""
    attrs = event.attributes
    etype = event.event_type
    if etype is EventType.PASS:
        yield STAT_INDEX["pass_total"], 1.0
        for flag, stat in _PASS_FLAG_STATS:
            if attrs.get(flag):
                yield STAT_INDEX[stat], 1.0
    elif etype is EventType.SHOT:
        yield STAT_INDEX["shot_total"], 1.0
        yield STAT_INDEX["shot_statsbomb_xg"], float(event.xg or 0.0)
        for flag, stat in _SHOT_FLAG_STATS:
            if attrs.get(flag):
                yield STAT_INDEX[stat], 1.0
    elif etype is EventType.INTERCEPTION:
        yield STAT_INDEX["interception_total"], 1.0
        if attrs.get("won"):
            yield STAT_INDEX["interception_won"], 1.0
        else:
            yield STAT_INDEX["interception_lost"], 1.0
    elif etype is EventType.DRIBBLE:
        yield STAT_INDEX["dribble_total"], 1.0
        if attrs.get("complete"):
            yield STAT_INDEX["dribble_complete"], 1.0
        else:
            yield STAT_INDEX["dribble_incomplete"], 1.0
    elif etype is EventType.FOUL_WON:
        yield STAT_INDEX["foul_won_total"], 1.0
        if attrs.get("penalty"):
            yield STAT_INDEX["foul_won_penalty"], 1.0
    elif etype is EventType.FOUL_COMMITTED:
        yield STAT_INDEX["foul_committed_total"], 1.0
        if attrs.get("penalty"):
            yield STAT_INDEX["foul_committed_penalty"], 1.0
        if attrs.get("yellow_card"):
            yield STAT_INDEX["foul_committed_yellow_card"], 1.0
        if attrs.get("red_card"):
            yield STAT_INDEX["foul_committed_red_card"], 1.0
    elif etype is EventType.GOALKEEPER_ACTION:
        if attrs.get("goal_conceded"):
            yield STAT_INDEX["goalkeeper_goal_conceded"], 1.0
        if attrs.get("save"):
            yield STAT_INDEX["goalkeeper_save"], 1.0
        if attrs.get("shot_faced"):
            yield STAT_INDEX["goalkeeper_shot_faced"], 1.0
    elif etype is EventType.BLOCK:
        yield STAT_INDEX["block_total"], 1.0
    elif etype is EventType.CLEARANCE:
        yield STAT_INDEX["clearance_total"], 1.0
    elif etype is EventType.BALL_RECOVERY:
        yield STAT_INDEX["ball_recovery_total"], 1.0
    elif etype is EventType.COUNTERPRESS_TAG:
        yield STAT_INDEX["counterpress_total"], 1.0


def compute_player_stats(
    events, sheet: MatchSheet, kickoff_order: int = 0
) -> list[PlayerMatchStats]:
    """Aggregate one match's events into one row per sheet entry.

    Rows come back in sheet order (home squad, then away squad).
    Non-participants get the all-zero vector; an event referencing a player
    absent from the sheet is an integrity error.
    """
    events = list(events)
    on_sheet = {e.player_id for e in sheet.entries}
    totals = defaultdict(lambda: np.zeros(N_STATS, dtype=np.float64))
    for event in events:
        if event.player_id not in on_sheet:
            raise IntegrityError(
                f"event references player {event.player_id} absent from the "
                f"sheet of match {sheet.match_id}"
            )
        acc = totals[event.player_id]
        for idx, amount in event_contributions(event):
            acc[idx] += amount

    rows = []
    for entry in sheet.entries:
        stats = totals.get(entry.player_id)
        if not entry.participated:
            if stats is not None and stats.any():
                raise IntegrityError(
                    f"player {entry.player_id} is marked absent but has events "
                    f"in match {sheet.match_id}"
                )
            stats = np.zeros(N_STATS, dtype=np.float64)
        elif stats is None:
            stats = np.zeros(N_STATS, dtype=np.float64)
        rows.append(
            PlayerMatchStats(
                match_id=sheet.match_id,
                player_id=entry.player_id,
                team_id=entry.team_id,
                position_id=entry.position_id,
                participated=entry.participated,
                kickoff_order=kickoff_order,
                stats=stats,
                kickoff_date=sheet.kickoff_date,
                league_id=sheet.league_id,
            )
        )
    return rows


def kickoff_order_map(sheets) -> dict:
    """Chronological match index per match id (date, then id, ascending)."""
    ordered = sorted(sheets, key=lambda s: (s.kickoff_date or "", s.match_id))
    return {sheet.match_id: i for i, sheet in enumerate(ordered)}


def fill_unknown_positions(rows) -> int:
    """Replace UNK positions with the player's modal recorded position.

    Players never observed at a real position keep UNK. Returns the number
    of rows changed. Ties on frequency break toward the earliest match.
    """
    seen = defaultdict(Counter)
    first_seen = {}
    for row in sorted(rows, key=lambda r: r.kickoff_order):
        if row.position_id != UNKNOWN_POSITION:
            seen[row.player_id][row.position_id] += 1
            first_seen.setdefault((row.player_id, row.position_id), row.kickoff_order)
    modal = {}
    for player, counts in seen.items():
        best = min(
            counts.items(), key=lambda kv: (-kv[1], first_seen[(player, kv[0])])
        )
        modal[player] = best[0]
    changed = 0
    for row in rows:
        if row.position_id == UNKNOWN_POSITION and row.player_id in modal:
            row.position_id = modal[row.player_id]
            changed += 1
    return changed
