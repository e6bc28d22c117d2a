"""From raw event files to a per-player statistics dataset.

Builds a tiny two-match fixture in the native event format, parses it, and
shows the statistics rows and their internal-consistency guarantees.

Run: python3 demos/01_ingest_events.py
"""

import json
import tempfile
from pathlib import Path

from matchformer.ingest import (
    STAT_NAMES,
    compute_player_stats,
    export_dataset,
    kickoff_order_map,
    load_dataset,
    parse_events,
)
from matchformer.ingest.adapters import native_parse_sheet

POSITIONS = ("GK", "RB", "CB", "LB", "CDM", "RCM", "LCM", "RW", "ST", "LW")


def make_match(events_dir, lineups_dir, match_id, date, home, away, events):
    with open(events_dir / f"{match_id}.jsonl", "w") as fh:
        for event in events:
            fh.write(json.dumps(event) + "\n")
    entries = [
        {"player_id": f"{team}P{i}", "team_id": team,
         "position_id": POSITIONS[i], "participated": i < 9}
        for team in (home, away)
        for i in range(10)
    ]
    lineup = {"match_id": match_id, "kickoff_date": date, "league_id": "DEMO",
              "home_team_id": home, "away_team_id": away, "entries": entries}
    with open(lineups_dir / f"{match_id}.json", "w") as fh:
        json.dump(lineup, fh)


def event(match_id, etype, player, team, attributes=None, xg=None):
    record = {"match_id": match_id, "type": etype, "player_id": player,
              "team_id": team, "attributes": attributes or {}}
    if xg is not None:
        record["xg"] = xg
    return record


def main():
    root = Path(tempfile.mkdtemp(prefix="matchformer-demo-"))
    events_dir = root / "events"
    lineups_dir = root / "lineups"
    events_dir.mkdir()
    lineups_dir.mkdir()

    make_match(events_dir, lineups_dir, "M1", "2015-08-08", "HOME", "AWAY", [
        event("M1", "Pass", "HOMEP5", "HOME", {"cross": True}),
        event("M1", "Pass", "HOMEP5", "HOME", {"through_ball": True}),
        event("M1", "Pass", "HOMEP5", "HOME"),
        event("M1", "Shot", "HOMEP8", "HOME", {"goal": True, "open_play": True},
              xg=0.27),
        event("M1", "Shot", "AWAYP8", "AWAY", {"saved": True, "open_play": True},
              xg=0.11),
        event("M1", "GoalkeeperAction", "AWAYP0", "AWAY",
              {"goal_conceded": True, "shot_faced": True}),
        event("M1", "GoalkeeperAction", "HOMEP0", "HOME",
              {"save": True, "shot_faced": True}),
        event("M1", "Interception", "AWAYP4", "AWAY", {"won": True}),
        event("M1", "Dribble", "HOMEP9", "HOME", {"complete": True}),
    ])
    make_match(events_dir, lineups_dir, "M2", "2015-08-15", "AWAY", "HOME", [
        event("M2", "Pass", "AWAYP6", "AWAY", {"goal_assist": True}),
        event("M2", "Shot", "AWAYP8", "AWAY", {"goal": True, "open_play": True},
              xg=0.42),
        event("M2", "BallRecovery", "HOMEP4", "HOME"),
        event("M2", "CounterpressTag", "HOMEP4", "HOME"),
    ])

    parsed = []
    for event_file in sorted(events_dir.iterdir()):
        match_id = event_file.stem
        result = parse_events(event_file.read_bytes(), "native", match_id)
        lineup_raw = (lineups_dir / f"{match_id}.json").read_bytes()
        sheet = native_parse_sheet(lineup_raw, result.events, match_id)
        parsed.append((sheet, result.events))
        print(f"{match_id}: {len(result.events)} events, {result.dropped} dropped, "
              f"{len(sheet.entries)} squad players")

    orders = kickoff_order_map([s for s, _ in parsed])
    rows = []
    for sheet, evts in parsed:
        rows.extend(compute_player_stats(evts, sheet, orders[sheet.match_id]))

    print("\nnon-zero statistics per player:")
    for row in rows:
        nonzero = {STAT_NAMES[i]: round(float(v), 3)
                   for i, v in enumerate(row.stats) if v}
        if nonzero:
            print(f"  {row.match_id} {row.player_id:8s} {nonzero}")

    bench = [r for r in rows if not r.participated]
    print(f"\n{len(bench)} non-participants, all zero:",
          all(not r.stats.any() for r in bench))

    dataset = root / "dataset.jsonl"
    export_dataset(rows, [s for s, _ in parsed], dataset)
    rows2, sheets2 = load_dataset(dataset)
    print(f"round trip: {len(rows2)} rows, lossless: {rows2 == rows}")
    print(f"\nartifacts in {root}")


if __name__ == "__main__":
    main()
