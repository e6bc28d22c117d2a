"""Source-format adapters.

Each adapter turns raw bytes into :class:`NormalizedEvent` lists and match
sheets. Two adapters ship with the package:

``native``
    The package's own line-delimited JSON event format plus a one-object
    JSON lineup file. Used by the synthetic generators and fixtures.

``statsbomb``
    The StatsBomb open-data layout: one ``<match_id>.json`` event array and
    one ``<match_id>.json`` lineup array per match, optionally accompanied
    by a season match-list file supplying kickoff dates.

Raw records that map to no tracked event type are dropped and counted.
"""

from __future__ import annotations

import datetime
import json

from ..errors import ConfigError, IntegrityError, ParseError
from .types import (
    EventType,
    MatchSheet,
    NormalizedEvent,
    ParseResult,
    SheetEntry,
    UNKNOWN_POSITION,
)

_EVENT_TYPES_BY_NAME = {t.value: t for t in EventType}


def _json_loads(raw: bytes, what: str):
    try:
        return json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ParseError(f"{what} is not valid UTF-8", offset=exc.start) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: {exc.msg}", offset=exc.pos) from exc


# ---------------------------------------------------------------------------
# native adapter


def native_parse_events(raw: bytes, match_id: str | None = None) -> ParseResult:
    """Parse line-delimited JSON events; one object per line."""
    events = []
    dropped = 0
    offset = 0
    for line in raw.split(b"\n"):
        stripped = line.strip()
        if stripped:
            try:
                obj = json.loads(stripped.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise ParseError("malformed event line", offset=offset) from exc
            type_name = obj.get("type")
            etype = _EVENT_TYPES_BY_NAME.get(type_name)
            if etype is None:
                dropped += 1
            else:
                events.append(
                    NormalizedEvent(
                        match_id=str(obj.get("match_id", match_id)),
                        event_type=etype,
                        player_id=str(obj["player_id"]),
                        team_id=str(obj["team_id"]),
                        attributes=dict(obj.get("attributes", {})),
                        xg=obj.get("xg") if etype is EventType.SHOT else None,
                    )
                )
        offset += len(line) + 1
    return ParseResult(events=events, dropped=dropped)


def native_parse_sheet(raw: bytes, events, match_id: str | None = None) -> MatchSheet:
    obj = _json_loads(raw, "lineup file")
    date = obj.get("kickoff_date")
    entries = [
        SheetEntry(
            player_id=str(e["player_id"]),
            team_id=str(e["team_id"]),
            position_id=str(e.get("position_id", UNKNOWN_POSITION)),
            participated=bool(e.get("participated", False)),
        )
        for e in obj["entries"]
    ]
    sheet = MatchSheet(
        match_id=str(obj.get("match_id", match_id)),
        kickoff_date=datetime.date.fromisoformat(date) if date else None,
        league_id=str(obj.get("league_id", "")),
        home_team_id=str(obj["home_team_id"]),
        away_team_id=str(obj["away_team_id"]),
        entries=entries,
    )
    _mark_participants(sheet, events)
    return sheet.validate()


# ---------------------------------------------------------------------------
# statsbomb adapter

_SB_POSITION_CODES = {
    "Goalkeeper": "GK",
    "Right Back": "RB",
    "Right Center Back": "RCB",
    "Center Back": "CB",
    "Left Center Back": "LCB",
    "Left Back": "LB",
    "Right Wing Back": "RWB",
    "Left Wing Back": "LWB",
    "Right Defensive Midfield": "RDM",
    "Center Defensive Midfield": "CDM",
    "Left Defensive Midfield": "LDM",
    "Right Midfield": "RM",
    "Right Center Midfield": "RCM",
    "Center Midfield": "CM",
    "Left Center Midfield": "LCM",
    "Left Midfield": "LM",
    "Right Wing": "RW",
    "Right Attacking Midfield": "RAM",
    "Center Attacking Midfield": "CAM",
    "Left Attacking Midfield": "LAM",
    "Left Wing": "LW",
    "Right Center Forward": "RCF",
    "Center Forward": "ST",
    "Left Center Forward": "LCF",
    "Secondary Striker": "SS",
}

_SB_SAVE_TYPES = {
    "Shot Saved",
    "Penalty Saved",
    "Save",
    "Shot Saved Off Target",
    "Shot Saved To Post",
    "Penalty Saved To Post",
}
_SB_OFF_TARGET_OUTCOMES = {"Off T", "Wayward", "Post", "Saved Off Target"}
_SB_SAVED_OUTCOMES = {"Saved", "Saved To Post"}
_SB_INTERCEPTION_WON = {"Won", "Success", "Success In Play", "Success Out"}


def _sb_name(obj, key):
    value = obj.get(key)
    if isinstance(value, dict):
        return value.get("name", "")
    return ""


def _sb_pass_events(raw_event, match_id, player_id, team_id, intercepted_ids):
    data = raw_event.get("pass", {})
    outcome = _sb_name(data, "outcome")
    attrs = {}
    for flag in ("cross", "cut_back", "shot_assist", "goal_assist", "no_touch"):
        if data.get(flag):
            attrs[flag] = True
    if data.get("through_ball") or _sb_name(data, "technique") == "Through Ball":
        attrs["through_ball"] = True
    if outcome == "Incomplete":
        attrs["incomplete"] = True
    if outcome == "Pass Offside":
        attrs["offside"] = True
    if raw_event.get("id") in intercepted_ids:
        attrs["intercepted"] = True
    return [
        NormalizedEvent(match_id, EventType.PASS, player_id, team_id, attrs)
    ]


def _sb_shot_events(raw_event, match_id, player_id, team_id):
    data = raw_event.get("shot", {})
    outcome = _sb_name(data, "outcome")
    shot_type = _sb_name(data, "type")
    attrs = {}
    if shot_type == "Corner":
        attrs["corner"] = True
    elif shot_type == "Free Kick":
        attrs["free_kick"] = True
    elif shot_type == "Penalty":
        attrs["penalty"] = True
    elif shot_type in ("Open Play", "Kick Off", ""):
        attrs["open_play"] = True
    if outcome == "Goal":
        attrs["goal"] = True
    elif outcome in _SB_SAVED_OUTCOMES:
        attrs["saved"] = True
    elif outcome == "Blocked":
        attrs["blocked"] = True
    elif outcome in _SB_OFF_TARGET_OUTCOMES:
        attrs["off_target"] = True
    return [
        NormalizedEvent(
            match_id,
            EventType.SHOT,
            player_id,
            team_id,
            attrs,
            xg=float(data.get("statsbomb_xg", 0.0)),
        )
    ]


def statsbomb_parse_events(raw: bytes, match_id: str | None = None) -> ParseResult:
    """Parse a StatsBomb open-data event array for one match."""
    raw_events = _json_loads(raw, "event file")
    if not isinstance(raw_events, list):
        raise ParseError("event file must contain a JSON array")
    mid = str(match_id) if match_id is not None else ""

    # Passes picked off by an opponent: linked through the interceptor's
    # related_events, since the pass record itself carries no such flag.
    intercepted_ids = set()
    for ev in raw_events:
        if _sb_name(ev, "type") == "Interception":
            intercepted_ids.update(ev.get("related_events", []))

    events = []
    dropped = 0
    for ev in raw_events:
        type_name = _sb_name(ev, "type")
        player = ev.get("player")
        team = ev.get("team")
        if not player or not team:
            dropped += 1
            continue
        player_id = str(player.get("id"))
        team_id = str(team.get("id"))
        emitted = []
        if type_name == "Pass":
            emitted = _sb_pass_events(ev, mid, player_id, team_id, intercepted_ids)
        elif type_name == "Shot":
            emitted = _sb_shot_events(ev, mid, player_id, team_id)
        elif type_name == "Interception":
            won = _sb_name(ev.get("interception", {}), "outcome") in _SB_INTERCEPTION_WON
            emitted = [
                NormalizedEvent(
                    mid, EventType.INTERCEPTION, player_id, team_id, {"won": won}
                )
            ]
        elif type_name == "Dribble":
            complete = _sb_name(ev.get("dribble", {}), "outcome") == "Complete"
            emitted = [
                NormalizedEvent(
                    mid, EventType.DRIBBLE, player_id, team_id, {"complete": complete}
                )
            ]
        elif type_name == "Foul Won":
            attrs = {"penalty": bool(ev.get("foul_won", {}).get("penalty"))}
            emitted = [
                NormalizedEvent(mid, EventType.FOUL_WON, player_id, team_id, attrs)
            ]
        elif type_name == "Foul Committed":
            data = ev.get("foul_committed", {})
            card = _sb_name(data, "card")
            attrs = {
                "penalty": bool(data.get("penalty")),
                "yellow_card": card == "Yellow Card",
                "red_card": card in ("Red Card", "Second Yellow"),
            }
            emitted = [
                NormalizedEvent(
                    mid, EventType.FOUL_COMMITTED, player_id, team_id, attrs
                )
            ]
        elif type_name == "Goal Keeper":
            gk_type = _sb_name(ev.get("goalkeeper", {}), "type")
            save = gk_type in _SB_SAVE_TYPES
            conceded = gk_type == "Goal Conceded"
            faced = save or conceded or gk_type == "Shot Faced"
            if save or conceded or faced:
                emitted = [
                    NormalizedEvent(
                        mid,
                        EventType.GOALKEEPER_ACTION,
                        player_id,
                        team_id,
                        {"save": save, "goal_conceded": conceded, "shot_faced": faced},
                    )
                ]
        elif type_name == "Block":
            emitted = [NormalizedEvent(mid, EventType.BLOCK, player_id, team_id)]
        elif type_name == "Clearance":
            emitted = [NormalizedEvent(mid, EventType.CLEARANCE, player_id, team_id)]
        elif type_name == "Ball Recovery":
            emitted = [
                NormalizedEvent(mid, EventType.BALL_RECOVERY, player_id, team_id)
            ]
        # Counterpress is a qualifier on several raw types; it contributes a
        # tag event on top of whatever the raw record otherwise maps to.
        if ev.get("counterpress"):
            emitted.append(
                NormalizedEvent(mid, EventType.COUNTERPRESS_TAG, player_id, team_id)
            )
        if emitted:
            events.extend(emitted)
        else:
            dropped += 1
    return ParseResult(events=events, dropped=dropped)


def statsbomb_parse_sheet(
    raw: bytes, events, match_id: str | None = None, meta: dict | None = None
) -> MatchSheet:
    """Build a match sheet from a StatsBomb lineup array.

    ``meta`` carries optional match metadata (kickoff date, competition,
    home team id) from the season match list; without it the first lineup
    block is taken as the home side and the date is left unset.
    """
    teams = _json_loads(raw, "lineup file")
    if not isinstance(teams, list) or len(teams) != 2:
        raise ParseError("lineup file must contain exactly two team blocks")
    meta = meta or {}
    team_ids = [str(t["team_id"]) for t in teams]
    home_id = str(meta.get("home_team_id", team_ids[0]))
    if home_id not in team_ids:
        raise IntegrityError(f"home team {home_id} not in lineup file")
    away_id = team_ids[1] if home_id == team_ids[0] else team_ids[0]
    ordered = sorted(teams, key=lambda t: str(t["team_id"]) != home_id)

    entries = []
    for team in ordered:
        tid = str(team["team_id"])
        for player in team.get("lineup", []):
            positions = player.get("positions") or []
            code = UNKNOWN_POSITION
            if positions:
                code = _SB_POSITION_CODES.get(
                    positions[0].get("position", ""), UNKNOWN_POSITION
                )
            entries.append(
                SheetEntry(
                    player_id=str(player["player_id"]),
                    team_id=tid,
                    position_id=code,
                    participated=bool(positions),
                )
            )
    date = meta.get("kickoff_date")
    sheet = MatchSheet(
        match_id=str(match_id if match_id is not None else meta.get("match_id", "")),
        kickoff_date=datetime.date.fromisoformat(date) if date else None,
        league_id=str(meta.get("league_id", "")),
        home_team_id=home_id,
        away_team_id=away_id,
        entries=entries,
    )
    _mark_participants(sheet, events)
    return sheet.validate()


def statsbomb_match_meta(raw: bytes) -> dict:
    """Index a StatsBomb season match list by match id."""
    matches = _json_loads(raw, "match list")
    meta = {}
    for m in matches:
        mid = str(m["match_id"])
        meta[mid] = {
            "match_id": mid,
            "kickoff_date": m.get("match_date"),
            "league_id": str(m.get("competition", {}).get("competition_id", "")),
            "home_team_id": str(m.get("home_team", {}).get("home_team_id", "")),
            "away_team_id": str(m.get("away_team", {}).get("away_team_id", "")),
        }
    return meta


def _mark_participants(sheet: MatchSheet, events) -> None:
    """Anyone referenced by an event participated, whatever the lineup says."""
    if not events:
        return
    active = {e.player_id for e in events}
    for entry in sheet.entries:
        if entry.player_id in active:
            entry.participated = True


ADAPTERS = {
    "native": {
        "parse_events": native_parse_events,
        "parse_sheet": native_parse_sheet,
    },
    "statsbomb": {
        "parse_events": statsbomb_parse_events,
        "parse_sheet": statsbomb_parse_sheet,
    },
}


def get_adapter(name: str) -> dict:
    try:
        return ADAPTERS[name]
    except KeyError:
        raise ConfigError(
            f"unknown adapter {name!r}; registered: {sorted(ADAPTERS)}"
        ) from None


def parse_events(raw: bytes, adapter: str, match_id: str | None = None) -> ParseResult:
    """Parse one raw event file with the named adapter.

    Events are returned in file order (match chronology); raw records that
    map to no tracked type are dropped and counted in the result.
    """
    return get_adapter(adapter)["parse_events"](raw, match_id)
