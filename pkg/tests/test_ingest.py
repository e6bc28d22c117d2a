"""Event parsing, statistic aggregation and dataset round-trips."""

import datetime
import json

import numpy as np
import pytest

from matchformer.errors import ConfigError, IntegrityError, ParseError
from matchformer.ingest import (
    EventType,
    MatchSheet,
    N_STATS,
    PlayerMatchStats,
    STAT_INDEX,
    STAT_NAMES,
    SheetEntry,
    compute_player_stats,
    export_dataset,
    fill_unknown_positions,
    get_adapter,
    kickoff_order_map,
    load_dataset,
    parse_events,
)
from matchformer.ingest.adapters import statsbomb_parse_events, statsbomb_parse_sheet
from matchformer import synth


def _jsonl(records) -> bytes:
    return ("\n".join(json.dumps(r) for r in records) + "\n").encode()


def _sheet(match_id="M1", date="2015-08-01", entries=(), home="H", away="A"):
    return MatchSheet(
        match_id=match_id,
        kickoff_date=datetime.date.fromisoformat(date),
        league_id="L",
        home_team_id=home,
        away_team_id=away,
        entries=list(entries),
    )


class TestNativeParsing:
    def test_single_pass_with_goal_assist(self):
        raw = _jsonl([
            {"match_id": "M1", "type": "Pass", "player_id": "p1",
             "team_id": "H", "attributes": {"goal_assist": True}},
        ])
        result = parse_events(raw, "native")
        assert len(result.events) == 1 and result.dropped == 0
        event = result.events[0]
        assert event.event_type is EventType.PASS
        assert event.attributes["goal_assist"] is True

    def test_empty_file(self):
        result = parse_events(b"", "native")
        assert result.events == [] and result.dropped == 0

    def test_all_eleven_event_types_fixture(self):
        # manifest written by hand alongside the fixture: 12 events, one
        # type appearing twice
        manifest = [
            ("Pass", "p1"), ("Pass", "p2"), ("Shot", "p3"),
            ("Interception", "p4"), ("Dribble", "p5"), ("FoulWon", "p6"),
            ("FoulCommitted", "p1"), ("GoalkeeperAction", "p7"),
            ("Block", "p2"), ("Clearance", "p3"), ("BallRecovery", "p4"),
            ("CounterpressTag", "p5"),
        ]
        records = [
            {"match_id": "M1", "type": t, "player_id": p, "team_id": "H",
             **({"xg": 0.1} if t == "Shot" else {})}
            for t, p in manifest
        ]
        result = parse_events(_jsonl(records), "native")
        assert len(result.events) == 12
        assert [e.event_type.value for e in result.events] == [t for t, _ in manifest]
        assert result.dropped == 0

    def test_unknown_types_dropped_and_counted(self):
        records = [
            {"match_id": "M1", "type": "Pass", "player_id": "p", "team_id": "H"},
            {"match_id": "M1", "type": "Carry", "player_id": "p", "team_id": "H"},
            {"match_id": "M1", "type": "Pressure", "player_id": "p", "team_id": "H"},
        ]
        result = parse_events(_jsonl(records), "native")
        assert len(result.events) == 1 and result.dropped == 2

    def test_malformed_line_raises_with_offset(self):
        raw = b'{"type": "Pass", "player_id": "p", "team_id": "H", "match_id": "M"}\nnot json\n'
        with pytest.raises(ParseError, match="byte offset"):
            parse_events(raw, "native")

    def test_unknown_adapter(self):
        with pytest.raises(ConfigError, match="unknown adapter"):
            parse_events(b"", "nope")


def _sb_event(type_name, player=1, team=10, **extra):
    record = {
        "id": extra.pop("id", f"{type_name}-{player}"),
        "type": {"name": type_name},
        "player": {"id": player},
        "team": {"id": team},
    }
    record.update(extra)
    return record


class TestStatsBombAdapter:
    def test_pass_flags_and_outcomes(self):
        raw = json.dumps([
            _sb_event("Pass", id="e1",
                      **{"pass": {"cross": True, "shot_assist": True}}),
            _sb_event("Pass", id="e2",
                      **{"pass": {"outcome": {"name": "Incomplete"}}}),
            _sb_event("Pass", id="e3",
                      **{"pass": {"outcome": {"name": "Pass Offside"}}}),
            _sb_event("Pass", id="e4",
                      **{"pass": {"technique": {"name": "Through Ball"}}}),
        ]).encode()
        events = statsbomb_parse_events(raw, "9").events
        assert events[0].attributes == {"cross": True, "shot_assist": True}
        assert events[1].attributes == {"incomplete": True}
        assert events[2].attributes == {"offside": True}
        assert events[3].attributes == {"through_ball": True}
        assert all(e.match_id == "9" for e in events)

    def test_intercepted_pass_via_related_events(self):
        raw = json.dumps([
            _sb_event("Pass", id="pass-1",
                      **{"pass": {"outcome": {"name": "Incomplete"}}}),
            _sb_event("Interception", player=2, team=20,
                      related_events=["pass-1"],
                      interception={"outcome": {"name": "Won"}}),
        ]).encode()
        events = statsbomb_parse_events(raw).events
        passes = [e for e in events if e.event_type is EventType.PASS]
        assert passes[0].attributes.get("intercepted") is True
        inters = [e for e in events if e.event_type is EventType.INTERCEPTION]
        assert inters[0].attributes == {"won": True}

    def test_shot_types_and_outcomes(self):
        raw = json.dumps([
            _sb_event("Shot", shot={"statsbomb_xg": 0.42,
                                    "type": {"name": "Open Play"},
                                    "outcome": {"name": "Goal"}}),
            _sb_event("Shot", shot={"statsbomb_xg": 0.05,
                                    "type": {"name": "Free Kick"},
                                    "outcome": {"name": "Off T"}}),
            _sb_event("Shot", shot={"statsbomb_xg": 0.76,
                                    "type": {"name": "Penalty"},
                                    "outcome": {"name": "Saved"}}),
        ]).encode()
        events = statsbomb_parse_events(raw).events
        assert events[0].xg == 0.42
        assert events[0].attributes == {"open_play": True, "goal": True}
        assert events[1].attributes == {"free_kick": True, "off_target": True}
        assert events[2].attributes == {"penalty": True, "saved": True}

    def test_cards_keeper_and_counterpress(self):
        raw = json.dumps([
            _sb_event("Foul Committed",
                      foul_committed={"card": {"name": "Second Yellow"}}),
            _sb_event("Foul Won", foul_won={"penalty": True}),
            _sb_event("Goal Keeper",
                      goalkeeper={"type": {"name": "Shot Saved"}}),
            _sb_event("Goal Keeper",
                      goalkeeper={"type": {"name": "Goal Conceded"}}),
            _sb_event("Pressure", counterpress=True),
            _sb_event("Interception", counterpress=True,
                      interception={"outcome": {"name": "Lost In Play"}}),
            _sb_event("Ball Recovery"),
            _sb_event("Carry"),
        ]).encode()
        result = statsbomb_parse_events(raw)
        types = [e.event_type for e in result.events]
        assert types.count(EventType.COUNTERPRESS_TAG) == 2
        assert types.count(EventType.INTERCEPTION) == 1
        fouls = [e for e in result.events
                 if e.event_type is EventType.FOUL_COMMITTED]
        assert fouls[0].attributes["red_card"] and not fouls[0].attributes["yellow_card"]
        keepers = [e for e in result.events
                   if e.event_type is EventType.GOALKEEPER_ACTION]
        assert keepers[0].attributes == {"save": True, "goal_conceded": False,
                                         "shot_faced": True}
        assert keepers[1].attributes == {"save": False, "goal_conceded": True,
                                         "shot_faced": True}
        # the plain Carry is dropped; the Pressure only surfaced as a tag
        assert result.dropped == 1

    def test_lineups_and_participation(self):
        lineup = json.dumps([
            {"team_id": 10, "lineup": [
                {"player_id": 1, "positions": [{"position": "Goalkeeper"}]},
                {"player_id": 2, "positions": [{"position": "Center Forward"}]},
                {"player_id": 3, "positions": []},  # unused sub
            ]},
            {"team_id": 20, "lineup": [
                {"player_id": 4, "positions": [{"position": "Left Wing"}]},
                {"player_id": 5, "positions": []},
            ]},
        ]).encode()
        events = statsbomb_parse_events(json.dumps([
            _sb_event("Pass", player=5, team=20, **{"pass": {}}),
        ]).encode(), "9").events
        sheet = statsbomb_parse_sheet(
            lineup, events, "9",
            meta={"kickoff_date": "2015-09-12", "home_team_id": "20",
                  "league_id": "2"},
        )
        assert sheet.home_team_id == "20" and sheet.away_team_id == "10"
        assert sheet.kickoff_date == datetime.date(2015, 9, 12)
        # home squad listed first
        assert [e.team_id for e in sheet.entries] == ["20", "20", "10", "10", "10"]
        by_player = {e.player_id: e for e in sheet.entries}
        assert by_player["1"].position_id == "GK"
        assert by_player["2"].position_id == "ST"
        assert by_player["3"].position_id == "UNK"
        assert not by_player["3"].participated
        assert by_player["5"].participated  # referenced by an event


def _entries(team, players, positions=None, participated=True):
    positions = positions or ["CM"] * len(players)
    return [SheetEntry(p, team, pos, participated)
            for p, pos in zip(players, positions)]


class TestComputePlayerStats:
    def test_counting_passes_and_crosses(self):
        raw = _jsonl([
            {"match_id": "M1", "type": "Pass", "player_id": "p1", "team_id": "H",
             "attributes": {"cross": True}},
            {"match_id": "M1", "type": "Pass", "player_id": "p1", "team_id": "H"},
            {"match_id": "M1", "type": "Pass", "player_id": "p1", "team_id": "H"},
        ])
        events = parse_events(raw, "native").events
        sheet = _sheet(entries=_entries("H", ["p1"]) + _entries("A", ["p2"]))
        rows = compute_player_stats(events, sheet)
        assert rows[0].stat("pass_total") == 3
        assert rows[0].stat("pass_cross") == 1

    def test_non_participant_gets_zeros(self):
        sheet = _sheet(entries=(
            _entries("H", ["p1"]) + _entries("A", ["p2"], participated=False)
        ))
        rows = compute_player_stats([], sheet)
        assert not rows[1].participated
        np.testing.assert_array_equal(rows[1].stats, np.zeros(N_STATS))

    def test_event_for_absent_player_raises(self):
        raw = _jsonl([{"match_id": "M1", "type": "Pass", "player_id": "ghost",
                       "team_id": "H"}])
        events = parse_events(raw, "native").events
        sheet = _sheet(entries=_entries("H", ["p1"]) + _entries("A", ["p2"]))
        with pytest.raises(IntegrityError, match="ghost"):
            compute_player_stats(events, sheet)

    def test_events_for_marked_absent_player_raise(self):
        raw = _jsonl([{"match_id": "M1", "type": "Pass", "player_id": "p2",
                       "team_id": "A"}])
        events = parse_events(raw, "native").events
        sheet = _sheet(entries=(
            _entries("H", ["p1"])
            + [SheetEntry("p2", "A", "CM", participated=False)]
        ))
        with pytest.raises(IntegrityError, match="p2"):
            compute_player_stats(events, sheet)

    def test_fixture_matches_hand_tally(self):
        """40 events over 6 players against an independent tally oracle."""
        gen = np.random.default_rng(17)
        players = [("h1", "H"), ("h2", "H"), ("h3", "H"),
                   ("a1", "A"), ("a2", "A"), ("a3", "A")]
        type_pool = ["Pass", "Shot", "Interception", "Dribble", "FoulWon",
                     "FoulCommitted", "Block", "Clearance", "BallRecovery",
                     "CounterpressTag"]
        flag_pool = {
            "Pass": ["cross", "cut_back", "shot_assist", "goal_assist",
                     "no_touch", "intercepted", "incomplete", "offside",
                     "through_ball"],
            "Shot": ["corner", "free_kick", "open_play", "penalty", "saved",
                     "off_target", "blocked", "goal"],
            "Interception": ["won"],
            "Dribble": ["complete"],
            "FoulWon": ["penalty"],
            "FoulCommitted": ["penalty", "yellow_card", "red_card"],
        }
        records = []
        for _ in range(40):
            etype = type_pool[gen.integers(len(type_pool))]
            player, team = players[gen.integers(len(players))]
            attributes = {
                flag: True
                for flag in flag_pool.get(etype, [])
                if gen.random() < 0.3
            }
            record = {"match_id": "M1", "type": etype, "player_id": player,
                      "team_id": team, "attributes": attributes}
            if etype == "Shot":
                record["xg"] = round(float(gen.random()) * 0.5, 3)
            records.append(record)

        expected = {p: np.zeros(N_STATS) for p, _ in players}
        for rec in records:  # independent brute-force tally
            stats = expected[rec["player_id"]]
            attrs = rec["attributes"]
            t = rec["type"]
            if t == "Pass":
                stats[STAT_INDEX["pass_total"]] += 1
                for flag, stat in [
                    ("cross", "pass_cross"), ("cut_back", "pass_cut_back"),
                    ("shot_assist", "pass_shot_assist"),
                    ("goal_assist", "pass_goal_assist"),
                    ("no_touch", "pass_no_touch"),
                    ("intercepted", "pass_interception"),
                    ("incomplete", "pass_incomplete"),
                    ("offside", "pass_offside"),
                    ("through_ball", "pass_through_ball"),
                ]:
                    if attrs.get(flag):
                        stats[STAT_INDEX[stat]] += 1
            elif t == "Shot":
                stats[STAT_INDEX["shot_total"]] += 1
                stats[STAT_INDEX["shot_statsbomb_xg"]] += rec["xg"]
                for flag in ("corner", "free_kick", "open_play", "penalty",
                             "saved", "off_target", "blocked", "goal"):
                    if attrs.get(flag):
                        stats[STAT_INDEX[f"shot_{flag}"]] += 1
            elif t == "Interception":
                stats[STAT_INDEX["interception_total"]] += 1
                key = "interception_won" if attrs.get("won") else "interception_lost"
                stats[STAT_INDEX[key]] += 1
            elif t == "Dribble":
                stats[STAT_INDEX["dribble_total"]] += 1
                key = "dribble_complete" if attrs.get("complete") else "dribble_incomplete"
                stats[STAT_INDEX[key]] += 1
            elif t == "FoulWon":
                stats[STAT_INDEX["foul_won_total"]] += 1
                if attrs.get("penalty"):
                    stats[STAT_INDEX["foul_won_penalty"]] += 1
            elif t == "FoulCommitted":
                stats[STAT_INDEX["foul_committed_total"]] += 1
                for flag, stat in [("penalty", "foul_committed_penalty"),
                                   ("yellow_card", "foul_committed_yellow_card"),
                                   ("red_card", "foul_committed_red_card")]:
                    if attrs.get(flag):
                        stats[STAT_INDEX[stat]] += 1
            elif t == "Block":
                stats[STAT_INDEX["block_total"]] += 1
            elif t == "Clearance":
                stats[STAT_INDEX["clearance_total"]] += 1
            elif t == "BallRecovery":
                stats[STAT_INDEX["ball_recovery_total"]] += 1
            elif t == "CounterpressTag":
                stats[STAT_INDEX["counterpress_total"]] += 1

        events = parse_events(_jsonl(records), "native").events
        sheet = _sheet(entries=(
            _entries("H", ["h1", "h2", "h3"]) + _entries("A", ["a1", "a2", "a3"])
        ))
        rows = compute_player_stats(events, sheet)
        for row in rows:
            np.testing.assert_allclose(row.stats, expected[row.player_id],
                                       atol=1e-12)

    def test_conservation_per_match(self):
        """Summed player stats equal event counts for every counting stat."""
        gen = np.random.default_rng(4)
        records = []
        for _ in range(60):
            team = "H" if gen.random() < 0.5 else "A"
            player = f"{team.lower()}{gen.integers(3)}"
            records.append({"match_id": "M1", "type": "Pass",
                            "player_id": player, "team_id": team,
                            "attributes": {"cross": bool(gen.random() < 0.2)}})
        events = parse_events(_jsonl(records), "native").events
        sheet = _sheet(entries=(
            _entries("H", ["h0", "h1", "h2"]) + _entries("A", ["a0", "a1", "a2"])
        ))
        rows = compute_player_stats(events, sheet)
        total = sum(row.stats for row in rows)
        assert total[STAT_INDEX["pass_total"]] == 60
        n_cross = sum(1 for r in records if r["attributes"].get("cross"))
        assert total[STAT_INDEX["pass_cross"]] == n_cross


class TestSyntheticConsistency:
    def test_component_sums_hold(self, small_league):
        rows, _ = small_league
        for row in rows:
            s = row.stats
            assert s[STAT_INDEX["dribble_total"]] == (
                s[STAT_INDEX["dribble_complete"]]
                + s[STAT_INDEX["dribble_incomplete"]]
            )
            assert s[STAT_INDEX["interception_total"]] == (
                s[STAT_INDEX["interception_won"]]
                + s[STAT_INDEX["interception_lost"]]
            )
            for name in STAT_NAMES[1:10]:
                assert s[STAT_INDEX[name]] <= s[STAT_INDEX["pass_total"]]
            assert np.all(s >= 0)

    def test_non_participants_are_zero(self, small_league):
        rows, _ = small_league
        bench = [r for r in rows if not r.participated]
        assert bench, "fixture should include bench players"
        for row in bench:
            assert not row.stats.any()


class TestDatasetFile:
    def test_round_trip_is_lossless(self, tmp_path, small_league):
        rows, sheets = small_league
        path = tmp_path / "data.jsonl"
        export_dataset(rows, sheets, path)
        rows2, sheets2 = load_dataset(path)
        assert rows2 == rows
        assert sheets2 == sheets

    def test_empty_dataset_is_header_only(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        export_dataset([], [], path)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 1
        assert json.loads(lines[0])["format"] == "player-match-dataset"
        rows, sheets = load_dataset(path)
        assert rows == [] and sheets == []

    def test_missing_rows_for_sheet_entry(self, tmp_path):
        sheet = _sheet(entries=_entries("H", ["p1"]) + _entries("A", ["p2"]))
        rows = compute_player_stats([], sheet)[:1]
        with pytest.raises(IntegrityError, match="p2"):
            export_dataset(rows, [sheet], tmp_path / "x.jsonl")

    def test_row_field_names_exact(self, tmp_path, small_league):
        rows, sheets = small_league
        path = tmp_path / "data.jsonl"
        export_dataset(rows, sheets, path)
        with open(path) as fh:
            fh.readline()
            fh.readline()  # sheet record
            row = json.loads(fh.readline())
        expected = ["type", "match_id", "kickoff_date", "league_id",
                    "player_id", "team_id", "position_id", "participated"]
        expected += [f"s{i:02d}" for i in range(39)]
        assert list(row.keys()) == expected

    def test_nonzero_stats_for_non_participant_rejected(self, tmp_path):
        sheet = _sheet(entries=(
            _entries("H", ["p1"]) + [SheetEntry("p2", "A", "CM", False)]
        ))
        rows = compute_player_stats([], sheet)
        path = tmp_path / "bad.jsonl"
        export_dataset(rows, [sheet], path)
        text = path.read_text().replace(
            '"participated": false, "s00": 0.0',
            '"participated": false, "s00": 3.0',
        )
        path.write_text(text)
        with pytest.raises(IntegrityError, match="non-participant"):
            load_dataset(path)


class TestHelpers:
    def test_kickoff_order_sorts_by_date_then_id(self):
        sheets = [
            _sheet("B", "2015-08-02"),
            _sheet("A", "2015-08-02"),
            _sheet("C", "2015-08-01"),
        ]
        orders = kickoff_order_map(sheets)
        assert orders == {"C": 0, "A": 1, "B": 2}

    def test_fill_unknown_positions_uses_modal(self):
        def row(match, order, pos, participated=True):
            return PlayerMatchStats(
                match_id=match, player_id="p", team_id="T", position_id=pos,
                participated=participated, kickoff_order=order,
                stats=np.zeros(N_STATS),
            )

        rows = [row("m1", 0, "RB"), row("m2", 1, "CB"), row("m3", 2, "CB"),
                row("m4", 3, "UNK", participated=False)]
        changed = fill_unknown_positions(rows)
        assert changed == 1
        assert rows[3].position_id == "CB"

    def test_fill_keeps_unknown_without_history(self):
        row = PlayerMatchStats(
            match_id="m", player_id="q", team_id="T", position_id="UNK",
            participated=False, kickoff_order=0, stats=np.zeros(N_STATS),
        )
        assert fill_unknown_positions([row]) == 0
        assert row.position_id == "UNK"

    def test_get_adapter_lists_known(self):
        with pytest.raises(ConfigError, match="statsbomb"):
            get_adapter("missing")
