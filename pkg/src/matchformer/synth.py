"""Synthetic league generator.

Produces statistically plausible player-match rows without any external
data: every team has a persistent strength multiplier, every player a
persistent role profile, and per-match counts are Poisson draws around
those rates with a lognormal form factor. Internal consistency of the 39
statistics (sub-counts never exceeding totals, component sums matching
totals) holds by construction.

Useful for trying the full pipeline end-to-end and for capacity and
directional checks where real event data is unavailable.
"""

from __future__ import annotations

import datetime

import numpy as np

from .ingest.types import (
    N_STATS,
    STAT_INDEX,
    MatchSheet,
    PlayerMatchStats,
    SheetEntry,
)
from .seeding import rng_for

# Poisson leaf rates, indexed as below. Derived stats (totals, penalties,
# cards, saves) are built from these so consistency invariants hold.
_LEAVES = (
    "pass_plain", "cross", "cut_back", "shot_assist", "goal_assist",
    "no_touch", "intercepted", "incomplete", "offside", "through_ball",
    "shot_goal", "shot_saved", "shot_blocked", "shot_off_target",
    "int_won", "int_lost", "dribble_c", "dribble_i",
    "foul_won", "foul_committed", "gk_faced",
    "block", "clearance", "recovery", "counterpress",
)
_L = {name: i for i, name in enumerate(_LEAVES)}

_ROLE_RATES = {
    "GK": {"pass_plain": 18, "incomplete": 3, "gk_faced": 4.0, "clearance": 1.0,
           "recovery": 1.5},
    "DEF": {"pass_plain": 38, "cross": 1.2, "incomplete": 5, "intercepted": 0.6,
            "shot_goal": 0.05, "shot_saved": 0.15, "shot_blocked": 0.1,
            "shot_off_target": 0.2, "int_won": 1.2, "int_lost": 0.5,
            "dribble_c": 0.4, "dribble_i": 0.3, "foul_won": 0.8,
            "foul_committed": 1.2, "block": 0.8, "clearance": 3.5,
            "recovery": 4.0, "counterpress": 1.5},
    "MID": {"pass_plain": 48, "cross": 0.8, "cut_back": 0.3, "shot_assist": 0.9,
            "goal_assist": 0.12, "no_touch": 0.2, "intercepted": 0.8,
            "incomplete": 6, "offside": 0.1, "through_ball": 0.5,
            "shot_goal": 0.1, "shot_saved": 0.35, "shot_blocked": 0.3,
            "shot_off_target": 0.5, "int_won": 0.9, "int_lost": 0.4,
            "dribble_c": 1.1, "dribble_i": 0.7, "foul_won": 1.2,
            "foul_committed": 1.1, "block": 0.3, "clearance": 0.8,
            "recovery": 5.0, "counterpress": 3.0},
    "FWD": {"pass_plain": 20, "cross": 0.9, "cut_back": 0.4, "shot_assist": 0.7,
            "goal_assist": 0.15, "no_touch": 0.3, "intercepted": 0.7,
            "incomplete": 4, "offside": 0.5, "through_ball": 0.2,
            "shot_goal": 0.3, "shot_saved": 0.8, "shot_blocked": 0.5,
            "shot_off_target": 0.9, "int_won": 0.3, "int_lost": 0.2,
            "dribble_c": 1.8, "dribble_i": 1.2, "foul_won": 1.5,
            "foul_committed": 0.8, "block": 0.1, "clearance": 0.2,
            "recovery": 2.0, "counterpress": 2.5},
}

# Squad slot -> (position code, role); cycled for larger squads.
_SLOT_POSITIONS = (
    ("GK", "GK"),
    ("RB", "DEF"), ("RCB", "DEF"), ("LCB", "DEF"), ("LB", "DEF"),
    ("CDM", "MID"), ("RCM", "MID"), ("LCM", "MID"), ("CAM", "MID"),
    ("RW", "FWD"), ("ST", "FWD"), ("LW", "FWD"),
    ("CB", "DEF"), ("CM", "MID"), ("SS", "FWD"), ("RM", "MID"),
)


def _role_rate_vector(role: str) -> np.ndarray:
    rates = np.zeros(len(_LEAVES), dtype=np.float64)
    for leaf, value in _ROLE_RATES[role].items():
        rates[_L[leaf]] = value
    return rates


def _round_robin(n_teams: int, n_rounds: int):
    """Circle-method schedule; pairings repeat when rounds exceed n-1."""
    teams = list(range(n_teams))
    half = n_teams // 2
    for round_no in range(n_rounds):
        base = round_no % (n_teams - 1)
        rotation = [teams[0]] + teams[1:][-base:] + teams[1:][:-base] if base else teams[:]
        pairs = []
        for i in range(half):
            a, b = rotation[i], rotation[n_teams - 1 - i]
            # alternate home advantage between meetings
            if (round_no + i) % 2 == 0:
                pairs.append((a, b))
            else:
                pairs.append((b, a))
        yield round_no, pairs


def synth_league(
    n_teams: int = 8,
    squad_size: int = 12,
    n_rounds: int = 10,
    seed: int = 0,
    team_spread: float = 0.35,
    player_spread: float = 0.15,
    form_noise: float = 0.2,
    bench_per_team: int = 1,
    scale: float = 1.0,
    opponent_effect: float = 0.0,
    start_date: datetime.date = datetime.date(2015, 8, 1),
):
    """Generate ``(rows, sheets)`` for a synthetic season.

    ``team_spread`` controls how strongly team identity shifts all rates;
    ``form_noise`` is per-player per-match variation on top of that.
    ``opponent_effect`` (gamma >= 0) scales a side's rates by
    ``(own_strength / opponent_strength) ** gamma``, so match outcomes
    depend on who the opponent is, not just on own identity.
    """
    if n_teams % 2 != 0:
        raise ValueError("n_teams must be even for round-robin scheduling")
    rng = rng_for(seed, "synth-league")

    team_ids = [f"T{t:02d}" for t in range(n_teams)]
    team_factor = np.exp(rng.normal(0.0, team_spread, size=n_teams))

    squads = {}
    rate_matrix = {}
    for t, team in enumerate(team_ids):
        players = []
        rates = np.zeros((squad_size, len(_LEAVES)))
        for i in range(squad_size):
            code, role = _SLOT_POSITIONS[i % len(_SLOT_POSITIONS)]
            player_factor = float(np.exp(rng.normal(0.0, player_spread)))
            players.append((f"{team}P{i:02d}", code))
            rates[i] = _role_rate_vector(role) * player_factor
        rates *= team_factor[t] * scale
        squads[team] = players
        rate_matrix[team] = rates

    rows = []
    sheets = []
    order = 0
    for round_no, pairs in _round_robin(n_teams, n_rounds):
        date = start_date + datetime.timedelta(days=7 * round_no)
        for game_no, (home, away) in enumerate(pairs):
            match_id = f"M{round_no:02d}G{game_no:02d}"
            entries = []
            match_rows = []
            for team_idx, opp_idx in ((home, away), (away, home)):
                team = team_ids[team_idx]
                players = squads[team]
                match_rng = rng_for(seed, "match", match_id, team)
                bench = set()
                if bench_per_team > 0:
                    # the keeper (slot 0) always plays
                    bench = set(
                        1 + match_rng.choice(squad_size - 1,
                                             size=min(bench_per_team, squad_size - 1),
                                             replace=False)
                    )
                matchup = (
                    team_factor[team_idx] / team_factor[opp_idx]
                ) ** opponent_effect
                stats_block = _sample_team_stats(
                    match_rng, rate_matrix[team] * matchup, form_noise
                )
                for i, (player_id, code) in enumerate(players):
                    participated = i not in bench
                    stats = stats_block[i] if participated else np.zeros(N_STATS)
                    entries.append(
                        SheetEntry(player_id, team, code, participated)
                    )
                    match_rows.append(
                        PlayerMatchStats(
                            match_id=match_id,
                            player_id=player_id,
                            team_id=team,
                            position_id=code,
                            participated=participated,
                            kickoff_order=order,
                            stats=stats,
                            kickoff_date=date,
                            league_id="SYN",
                        )
                    )
            sheets.append(
                MatchSheet(
                    match_id=match_id,
                    kickoff_date=date,
                    league_id="SYN",
                    home_team_id=team_ids[home],
                    away_team_id=team_ids[away],
                    entries=entries,
                ).validate()
            )
            rows.extend(match_rows)
            order += 1
    return rows, sheets


def _sample_team_stats(rng, rates: np.ndarray, form_noise: float) -> np.ndarray:
    """Draw one match of statistics for a whole squad, [squad, 39]."""
    squad = rates.shape[0]
    form = np.exp(rng.normal(0.0, form_noise, size=(squad, 1)))
    leaves = rng.poisson(rates * form).astype(np.float64)

    out = np.zeros((squad, N_STATS))

    def leaf(name):
        return leaves[:, _L[name]]

    pass_flags = {
        "pass_cross": leaf("cross"),
        "pass_cut_back": leaf("cut_back"),
        "pass_shot_assist": leaf("shot_assist"),
        "pass_goal_assist": leaf("goal_assist"),
        "pass_no_touch": leaf("no_touch"),
        "pass_interception": leaf("intercepted"),
        "pass_incomplete": leaf("incomplete"),
        "pass_offside": leaf("offside"),
        "pass_through_ball": leaf("through_ball"),
    }
    total = leaf("pass_plain").copy()
    for name, counts in pass_flags.items():
        out[:, STAT_INDEX[name]] = counts
        total += counts
    out[:, STAT_INDEX["pass_total"]] = total

    goals = leaf("shot_goal")
    saved = leaf("shot_saved")
    blocked = leaf("shot_blocked")
    off_target = leaf("shot_off_target")
    shots = goals + saved + blocked + off_target
    out[:, STAT_INDEX["shot_goal"]] = goals
    out[:, STAT_INDEX["shot_saved"]] = saved
    out[:, STAT_INDEX["shot_blocked"]] = blocked
    out[:, STAT_INDEX["shot_off_target"]] = off_target
    out[:, STAT_INDEX["shot_total"]] = shots
    # split shot origins by sequential binomial thinning
    n = shots.astype(np.int64)
    corner = rng.binomial(n, 0.08)
    rest = n - corner
    free_kick = rng.binomial(rest, 0.05)
    rest = rest - free_kick
    penalty = rng.binomial(rest, 0.02)
    open_play = rest - penalty
    out[:, STAT_INDEX["shot_corner"]] = corner
    out[:, STAT_INDEX["shot_free_kick"]] = free_kick
    out[:, STAT_INDEX["shot_penalty"]] = penalty
    out[:, STAT_INDEX["shot_open_play"]] = open_play
    out[:, STAT_INDEX["shot_statsbomb_xg"]] = np.where(
        n > 0, rng.gamma(np.maximum(n, 1) * 2.0, 0.05), 0.0
    )

    out[:, STAT_INDEX["interception_won"]] = leaf("int_won")
    out[:, STAT_INDEX["interception_lost"]] = leaf("int_lost")
    out[:, STAT_INDEX["interception_total"]] = leaf("int_won") + leaf("int_lost")

    out[:, STAT_INDEX["dribble_complete"]] = leaf("dribble_c")
    out[:, STAT_INDEX["dribble_incomplete"]] = leaf("dribble_i")
    out[:, STAT_INDEX["dribble_total"]] = leaf("dribble_c") + leaf("dribble_i")

    won = leaf("foul_won").astype(np.int64)
    committed = leaf("foul_committed").astype(np.int64)
    out[:, STAT_INDEX["foul_won_total"]] = won
    out[:, STAT_INDEX["foul_won_penalty"]] = rng.binomial(won, 0.03)
    out[:, STAT_INDEX["foul_committed_total"]] = committed
    out[:, STAT_INDEX["foul_committed_penalty"]] = rng.binomial(committed, 0.02)
    yellows = rng.binomial(committed, 0.15)
    out[:, STAT_INDEX["foul_committed_yellow_card"]] = yellows
    out[:, STAT_INDEX["foul_committed_red_card"]] = rng.binomial(yellows, 0.08)

    faced = leaf("gk_faced").astype(np.int64)
    saves = rng.binomial(faced, 0.72)
    out[:, STAT_INDEX["goalkeeper_shot_faced"]] = faced
    out[:, STAT_INDEX["goalkeeper_save"]] = saves
    out[:, STAT_INDEX["goalkeeper_goal_conceded"]] = faced - saves

    out[:, STAT_INDEX["block_total"]] = leaf("block")
    out[:, STAT_INDEX["clearance_total"]] = leaf("clearance")
    out[:, STAT_INDEX["ball_recovery_total"]] = leaf("recovery")
    out[:, STAT_INDEX["counterpress_total"]] = leaf("counterpress")
    return out
