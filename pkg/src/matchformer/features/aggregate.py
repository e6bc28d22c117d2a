"""Aggregated form features and team-level targets.

Each player entering a match is described by 234 numbers: the 39 base
statistics aggregated as sum, mean and population standard deviation over
two windows ending strictly before the match — the season so far and the
last five prior matches. Windows with no matches produce zeros.
"""

from __future__ import annotations

import numpy as np

from ..errors import IntegrityError
from ..ingest.types import N_STATS, N_TEAM_STATS, TEAM_TARGET_INDICES, MatchSheet

NMSP_WIDTH = 6 * N_STATS  # 234
LAST_N = 5


def _window_blocks(window: np.ndarray) -> np.ndarray:
    """[sum | mean | std] for one window of stat rows (may be empty)."""
    if window.shape[0] == 0:
        return np.zeros(3 * N_STATS, dtype=np.float64)
    total = window.sum(axis=0)
    mean = total / window.shape[0]
    var = np.mean((window - mean) ** 2, axis=0)
    return np.concatenate([total, mean, np.sqrt(var)])


def aggregate_form_features(history: np.ndarray, target_index: int) -> np.ndarray:
    """234-vector for the match at ``target_index`` of one player's history.

    ``history`` is the player's stat rows in kickoff order, shape [m, 39].
    Only rows strictly before ``target_index`` contribute. Layout:
    [season sum | season mean | season std | last-5 sum | last-5 mean |
    last-5 std].
    """
    history = np.asarray(history, dtype=np.float64)
    if history.ndim != 2 or history.shape[1] != N_STATS:
        raise IntegrityError(
            f"history must be [m, {N_STATS}], got {history.shape}"
        )
    prior = history[:target_index]
    season = _window_blocks(prior)
    last5 = _window_blocks(prior[-LAST_N:])
    return np.concatenate([season, last5])


def team_targets(rows, sheet: MatchSheet) -> np.ndarray:
    """36-vector of team statistics for one match: home 18 first, then away.

    Each team value is the sum of the squad players' statistics for the 18
    target statistics.
    """
    per_team = {sheet.home_team_id: [], sheet.away_team_id: []}
    for row in rows:
        if row.team_id not in per_team:
            raise IntegrityError(
                f"row team {row.team_id} unknown for match {sheet.match_id}"
            )
        per_team[row.team_id].append(row)
    idx = list(TEAM_TARGET_INDICES)
    halves = []
    for team in (sheet.home_team_id, sheet.away_team_id):
        members = sorted(per_team[team], key=lambda r: r.player_id)
        if members:
            # canonical order makes the sum independent of row order
            total = np.stack([r.stats for r in members]).sum(axis=0)
        else:
            total = np.zeros(N_STATS, dtype=np.float64)
        halves.append(total[idx])
    out = np.concatenate(halves)
    assert out.shape == (2 * N_TEAM_STATS,)
    return out
