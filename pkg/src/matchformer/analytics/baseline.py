"""Last-five-matches baseline forecaster for team statistics."""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from ..errors import ConfigError
from ..features.aggregate import team_targets
from ..features.corpus import group_rows_by_match

WINDOW = 5


def baseline_last5(history, target_index: int):
    """Mean of the (up to five) team-stat vectors preceding ``target_index``.

    ``history`` holds one vector per played match in kickoff order. With no
    prior matches the match cannot be forecast: returns None rather than
    raising, so callers can exclude it from evaluation.
    """
    if target_index < 0 or target_index > len(history):
        raise ConfigError(
            f"target index {target_index} outside history of {len(history)}"
        )
    if target_index == 0:
        return None
    window = np.asarray(
        history[max(0, target_index - WINDOW) : target_index], dtype=np.float64
    )
    return window.mean(axis=0)


def build_team_histories(rows, sheets) -> dict:
    """Chronological 18-stat vectors per team: ``{team: [(order, vec)]}``."""
    grouped = group_rows_by_match(rows)
    histories = defaultdict(list)
    for sheet in sorted(sheets, key=lambda s: (s.kickoff_date or "", s.match_id)):
        match_rows = grouped[sheet.match_id]
        order = match_rows[0].kickoff_order
        targets = team_targets(match_rows, sheet)
        n = targets.shape[0] // 2
        histories[sheet.home_team_id].append((order, targets[:n]))
        histories[sheet.away_team_id].append((order, targets[n:]))
    return dict(histories)


def baseline_for_match(histories: dict, sheet, kickoff_order: int):
    """36-vector forecast for one match: home half then away half.

    Each side is forecast from its strictly earlier matches; when either
    side has none, the match is unforecastable and None is returned.
    """
    halves = []
    for team in (sheet.home_team_id, sheet.away_team_id):
        prior = [vec for order, vec in histories.get(team, ())
                 if order < kickoff_order]
        forecast = baseline_last5(prior, len(prior))
        if forecast is None:
            return None
        halves.append(forecast)
    return np.concatenate(halves)
