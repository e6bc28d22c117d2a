"""Event-data ingestion: adapters, statistic aggregation, dataset files."""

from .adapters import ADAPTERS, get_adapter, parse_events, statsbomb_match_meta
from .dataset import export_dataset, load_dataset
from .stats import (
    compute_player_stats,
    event_contributions,
    fill_unknown_positions,
    kickoff_order_map,
)
from .types import (
    N_STATS,
    N_TEAM_STATS,
    POSITION_CODES,
    STAT_INDEX,
    STAT_NAMES,
    TEAM_TARGET_INDICES,
    TEAM_TARGET_STATS,
    UNKNOWN_POSITION,
    EventType,
    MatchSheet,
    NormalizedEvent,
    ParseResult,
    PlayerMatchStats,
    SheetEntry,
)

__all__ = [
    "ADAPTERS",
    "EventType",
    "MatchSheet",
    "N_STATS",
    "N_TEAM_STATS",
    "NormalizedEvent",
    "POSITION_CODES",
    "ParseResult",
    "PlayerMatchStats",
    "STAT_INDEX",
    "STAT_NAMES",
    "SheetEntry",
    "TEAM_TARGET_INDICES",
    "TEAM_TARGET_STATS",
    "UNKNOWN_POSITION",
    "compute_player_stats",
    "event_contributions",
    "export_dataset",
    "fill_unknown_positions",
    "get_adapter",
    "kickoff_order_map",
    "load_dataset",
    "parse_events",
    "statsbomb_match_meta",
]
