"""Line-record dataset file: one JSON object per line.

Layout: a header line, then for each match its sheet record followed by one
row record per squad player (home squad first, then away, in sheet order).
Row fields are exactly: match_id, kickoff_date, league_id, player_id,
team_id, position_id, participated, s00..s38. The sheet record carries the
match-level fields rows cannot encode (home/away assignment). Kickoff order
is not stored; it is recomputed from dates on load.
"""

from __future__ import annotations

import datetime
import json
from collections import defaultdict

import numpy as np

from ..errors import IntegrityError, ParseError
from .types import N_STATS, MatchSheet, PlayerMatchStats, SheetEntry
from .stats import kickoff_order_map

FORMAT_NAME = "player-match-dataset"
FORMAT_VERSION = 1

_STAT_FIELDS = [f"s{i:02d}" for i in range(N_STATS)]


def _row_record(row: PlayerMatchStats) -> dict:
    rec = {
        "type": "row",
        "match_id": row.match_id,
        "kickoff_date": row.kickoff_date.isoformat() if row.kickoff_date else None,
        "league_id": row.league_id,
        "player_id": row.player_id,
        "team_id": row.team_id,
        "position_id": row.position_id,
        "participated": row.participated,
    }
    for name, value in zip(_STAT_FIELDS, row.stats):
        rec[name] = float(value)
    return rec


def export_dataset(rows, sheets, path) -> None:
    """Write rows and sheets to ``path``; the format round-trips losslessly."""
    by_match = defaultdict(list)
    for row in rows:
        by_match[row.match_id].append(row)
    for sheet in sheets:
        match_rows = {r.player_id for r in by_match.get(sheet.match_id, [])}
        missing = [e.player_id for e in sheet.entries if e.player_id not in match_rows]
        if missing:
            raise IntegrityError(
                f"match {sheet.match_id} is missing rows for players {missing}"
            )
    with open(path, "w", encoding="utf-8") as fh:
        header = {"format": FORMAT_NAME, "version": FORMAT_VERSION}
        fh.write(json.dumps(header) + "\n")
        for sheet in sheets:
            sheet_rec = {
                "type": "sheet",
                "match_id": sheet.match_id,
                "kickoff_date": (
                    sheet.kickoff_date.isoformat() if sheet.kickoff_date else None
                ),
                "league_id": sheet.league_id,
                "home_team_id": sheet.home_team_id,
                "away_team_id": sheet.away_team_id,
            }
            fh.write(json.dumps(sheet_rec) + "\n")
            for row in by_match[sheet.match_id]:
                fh.write(json.dumps(_row_record(row)) + "\n")


def load_dataset(path):
    """Read a dataset file back into ``(rows, sheets)``."""
    sheets = []
    raw_rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise ParseError(f"{path}: empty dataset file")
        header = json.loads(header_line)
        if header.get("format") != FORMAT_NAME:
            raise ParseError(f"{path}: not a {FORMAT_NAME} file")
        if header.get("version") != FORMAT_VERSION:
            raise ParseError(
                f"{path}: unsupported version {header.get('version')}"
            )
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec["type"] == "sheet":
                sheets.append(
                    MatchSheet(
                        match_id=rec["match_id"],
                        kickoff_date=(
                            datetime.date.fromisoformat(rec["kickoff_date"])
                            if rec["kickoff_date"]
                            else None
                        ),
                        league_id=rec["league_id"],
                        home_team_id=rec["home_team_id"],
                        away_team_id=rec["away_team_id"],
                        entries=[],
                    )
                )
            elif rec["type"] == "row":
                raw_rows.append(rec)
            else:
                raise ParseError(f"{path}: unknown record type {rec['type']!r}")

    orders = kickoff_order_map(sheets)
    sheet_by_id = {s.match_id: s for s in sheets}
    rows = []
    for rec in raw_rows:
        sheet = sheet_by_id.get(rec["match_id"])
        if sheet is None:
            raise IntegrityError(
                f"row for match {rec['match_id']} has no sheet record"
            )
        stats = np.array([rec[f] for f in _STAT_FIELDS], dtype=np.float64)
        row = PlayerMatchStats(
            match_id=rec["match_id"],
            player_id=rec["player_id"],
            team_id=rec["team_id"],
            position_id=rec["position_id"],
            participated=rec["participated"],
            kickoff_order=orders[rec["match_id"]],
            stats=stats,
            kickoff_date=(
                datetime.date.fromisoformat(rec["kickoff_date"])
                if rec["kickoff_date"]
                else None
            ),
            league_id=rec["league_id"],
        )
        rows.append(row)
        sheet.entries.append(
            SheetEntry(
                player_id=row.player_id,
                team_id=row.team_id,
                position_id=row.position_id,
                participated=row.participated,
            )
        )
    for sheet in sheets:
        sheet.validate()
    for row in rows:
        if not row.participated and row.stats.any():
            raise IntegrityError(
                f"non-participant {row.player_id} in match {row.match_id} "
                "has nonzero statistics"
            )
    return rows, sheets
