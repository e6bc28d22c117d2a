"""Shared fixtures: synthetic leagues and hand-written event files."""

import json

import numpy as np
import pytest

from matchformer import features, synth


@pytest.fixture(scope="session")
def small_league():
    """A small deterministic league shared by read-only tests."""
    rows, sheets = synth.synth_league(
        n_teams=6, squad_size=12, n_rounds=8, seed=11, bench_per_team=1
    )
    return rows, sheets


@pytest.fixture(scope="session")
def small_vocab(small_league):
    rows, _ = small_league
    return features.build_vocabulary(rows)


def _native_event(match_id, etype, player, team, attributes=None, xg=None):
    record = {
        "match_id": match_id,
        "type": etype,
        "player_id": player,
        "team_id": team,
        "attributes": attributes or {},
    }
    if xg is not None:
        record["xg"] = xg
    return record


def write_native_match(events_dir, lineups_dir, match_id, date, home, away,
                       squads, events):
    """Write one native-format match: an event JSONL and a lineup JSON."""
    events_dir.mkdir(parents=True, exist_ok=True)
    lineups_dir.mkdir(parents=True, exist_ok=True)
    with open(events_dir / f"{match_id}.jsonl", "w") as fh:
        for event in events:
            fh.write(json.dumps(event) + "\n")
    entries = []
    for team, players in ((home, squads[home]), (away, squads[away])):
        for player, position, participated in players:
            entries.append(
                {
                    "player_id": player,
                    "team_id": team,
                    "position_id": position,
                    "participated": participated,
                }
            )
    lineup = {
        "match_id": match_id,
        "kickoff_date": date,
        "league_id": "FIX",
        "home_team_id": home,
        "away_team_id": away,
        "entries": entries,
    }
    with open(lineups_dir / f"{match_id}.json", "w") as fh:
        json.dump(lineup, fh)


POSITIONS_10 = ("GK", "RB", "CB", "LB", "CDM", "RCM", "LCM", "RW", "ST", "LW")


def two_match_fixture(root):
    """Two matches, four teams, forty players; returns (events_dir, lineups_dir)."""
    events_dir = root / "events"
    lineups_dir = root / "lineups"
    squads = {}
    for team in ("TA", "TB", "TC", "TD"):
        squads[team] = [
            (f"{team}P{i}", POSITIONS_10[i], True) for i in range(10)
        ]
    events_m1 = [
        _native_event("M1", "Pass", "TAP5", "TA", {"cross": True}),
        _native_event("M1", "Pass", "TAP5", "TA"),
        _native_event("M1", "Pass", "TAP5", "TA"),
        _native_event("M1", "Shot", "TAP8", "TA", {"goal": True, "open_play": True},
                      xg=0.31),
        _native_event("M1", "Interception", "TBP4", "TB", {"won": True}),
        _native_event("M1", "GoalkeeperAction", "TBP0", "TB",
                      {"goal_conceded": True, "shot_faced": True}),
        _native_event("M1", "Clearance", "TBP2", "TB"),
    ]
    events_m2 = [
        _native_event("M2", "Pass", "TCP6", "TC", {"goal_assist": True}),
        _native_event("M2", "Shot", "TCP8", "TC", {"saved": True, "open_play": True},
                      xg=0.12),
        _native_event("M2", "Dribble", "TDP7", "TD", {"complete": True}),
        _native_event("M2", "BallRecovery", "TDP5", "TD"),
        _native_event("M2", "CounterpressTag", "TDP5", "TD"),
    ]
    write_native_match(events_dir, lineups_dir, "M1", "2015-08-08", "TA", "TB",
                       squads, events_m1)
    write_native_match(events_dir, lineups_dir, "M2", "2015-08-09", "TC", "TD",
                       squads, events_m2)
    return events_dir, lineups_dir


@pytest.fixture()
def dataset_file(tmp_path, small_league):
    """The small league exported to a dataset file."""
    from matchformer.ingest import export_dataset

    rows, sheets = small_league
    path = tmp_path / "dataset.jsonl"
    export_dataset(rows, sheets, path)
    return path


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
