"""Corpus construction: masked pre-training samples and next-match examples.

Corpus files are line-delimited JSON with a version header. Padding tokens
are not stored; they are reconstructed from the vocabulary on load.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, IntegrityError, ParseError
from ..seeding import rng_for
from .aggregate import NMSP_WIDTH, aggregate_form_features, team_targets
from .tokens import SEQ_LEN, MaskedMatch, TokenizedMatch, augment_mpp, tokenize
from .vocab import Vocabulary

MPP_FORMAT = "mpp-corpus"
NMSP_FORMAT = "nmsp-corpus"
FORMAT_VERSION = 1


@dataclass(eq=False)
class NmspExample:
    """One match with aggregated 234-wide token features and 36 targets."""

    tokens: TokenizedMatch
    target: np.ndarray  # shape (36,): home team stats then away

    @property
    def match_id(self) -> str:
        return self.tokens.match_id

    @property
    def kickoff_order(self) -> int:
        return self.tokens.kickoff_order


def group_rows_by_match(rows) -> dict:
    """Rows per match id, preserving sheet order within each match."""
    grouped = defaultdict(list)
    for row in rows:
        grouped[row.match_id].append(row)
    return dict(grouped)


def tokenize_matches(rows, sheets, vocab: Vocabulary, seq_len: int = SEQ_LEN):
    """Tokenize every match, ordered chronologically."""
    grouped = group_rows_by_match(rows)
    ordered = sorted(sheets, key=lambda s: (s.kickoff_date or "", s.match_id))
    out = []
    for sheet in ordered:
        match_rows = grouped.get(sheet.match_id)
        if not match_rows:
            raise IntegrityError(f"no rows for match {sheet.match_id}")
        out.append(tokenize(match_rows, vocab, seq_len=seq_len))
    return out


def build_mpp_corpus(
    rows,
    sheets,
    vocab: Vocabulary,
    k: int = 10,
    mask_rate: float = 0.25,
    seed: int = 0,
    seq_len: int = SEQ_LEN,
) -> list[MaskedMatch]:
    """Tokenize all matches and emit ``k`` masked variants per match."""
    samples = []
    for tm in tokenize_matches(rows, sheets, vocab, seq_len=seq_len):
        samples.extend(augment_mpp(tm, k=k, mask_rate=mask_rate, seed=seed))
    return samples


def build_nmsp_dataset(
    rows, sheets, vocab: Vocabulary, seq_len: int = SEQ_LEN
) -> list[NmspExample]:
    """Aggregate per-player form features and team targets for every match.

    A player's history is the chronological list of their squad appearances
    in ``rows``; features for a match use only strictly earlier appearances.
    """
    grouped = group_rows_by_match(rows)
    ordered_sheets = sorted(sheets, key=lambda s: (s.kickoff_date or "", s.match_id))

    histories = defaultdict(list)  # player -> [(kickoff_order, stats)]
    for row in sorted(rows, key=lambda r: r.kickoff_order):
        histories[row.player_id].append((row.kickoff_order, row.stats))
    history_arrays = {
        p: (np.array([o for o, _ in h]), np.array([s for _, s in h]))
        for p, h in histories.items()
    }

    examples = []
    for sheet in ordered_sheets:
        match_rows = grouped.get(sheet.match_id)
        if not match_rows:
            raise IntegrityError(f"no rows for match {sheet.match_id}")
        order = match_rows[0].kickoff_order
        feature_rows = []
        for row in match_rows:
            orders, stats = history_arrays[row.player_id]
            target_index = int(np.searchsorted(orders, order, side="left"))
            feature_rows.append(aggregate_form_features(stats, target_index))
        base = tokenize(match_rows, vocab, seq_len=seq_len)
        stats = np.zeros((seq_len, NMSP_WIDTH), dtype=np.float64)
        stats[: base.n_real] = np.array(feature_rows)
        tokens = TokenizedMatch(
            match_id=base.match_id,
            kickoff_order=base.kickoff_order,
            player_idx=base.player_idx,
            position_idx=base.position_idx,
            team_idx=base.team_idx,
            stats=stats,
            is_pad=base.is_pad,
            n_real=base.n_real,
        )
        examples.append(
            NmspExample(tokens=tokens, target=team_targets(match_rows, sheet))
        )
    return examples


def split_dataset(items, ratio: float, mode: str = "random", seed: int = 0):
    """Partition into (train, validation).

    ``random`` shuffles with the given seed; ``chronological`` sorts by
    kickoff order and cuts so every validation item is no earlier than any
    training item. Train size is ``floor(ratio * n)``.
    """
    items = list(items)
    if not 0.0 < ratio < 1.0:
        raise ConfigError(f"split ratio must be in (0, 1), got {ratio}")
    if len(items) < 2:
        raise ConfigError("need at least 2 items to split")
    n_train = int(np.floor(ratio * len(items)))
    n_train = min(max(n_train, 1), len(items) - 1)
    if mode == "random":
        order = rng_for(seed, "split").permutation(len(items))
        shuffled = [items[i] for i in order]
        return shuffled[:n_train], shuffled[n_train:]
    if mode == "chronological":
        ordered = sorted(items, key=_kickoff_order_of)
        return ordered[:n_train], ordered[n_train:]
    raise ConfigError(f"unknown split mode {mode!r}")


def _kickoff_order_of(item) -> int:
    if hasattr(item, "kickoff_order"):
        return item.kickoff_order
    return item.base.kickoff_order


# ---------------------------------------------------------------------------
# corpus files


def _token_record(tm: TokenizedMatch) -> dict:
    n = tm.n_real
    return {
        "match_id": tm.match_id,
        "kickoff_order": tm.kickoff_order,
        "n_real": n,
        "player_idx": tm.player_idx[:n].tolist(),
        "position_idx": tm.position_idx[:n].tolist(),
        "team_idx": tm.team_idx[:n].tolist(),
        "stats": tm.stats[:n].tolist(),
    }


def _tokens_from_record(rec: dict, vocab: Vocabulary, seq_len: int, width: int):
    n = rec["n_real"]
    player_idx = np.full(seq_len, vocab.pad_index, dtype=np.int32)
    position_idx = np.full(seq_len, vocab.position_pad_index, dtype=np.int32)
    team_idx = np.full(seq_len, vocab.team_pad_index, dtype=np.int32)
    stats = np.zeros((seq_len, width), dtype=np.float64)
    is_pad = np.ones(seq_len, dtype=bool)
    player_idx[:n] = rec["player_idx"]
    position_idx[:n] = rec["position_idx"]
    team_idx[:n] = rec["team_idx"]
    stats[:n] = rec["stats"]
    is_pad[:n] = False
    return TokenizedMatch(
        match_id=rec["match_id"],
        kickoff_order=rec["kickoff_order"],
        player_idx=player_idx,
        position_idx=position_idx,
        team_idx=team_idx,
        stats=stats,
        is_pad=is_pad,
        n_real=n,
    )


def save_mpp_corpus(samples, path, seq_len: int = SEQ_LEN) -> None:
    matches = {}
    for s in samples:
        matches.setdefault(s.base.match_id, s.base)
    header = {
        "format": MPP_FORMAT,
        "version": FORMAT_VERSION,
        "seq_len": seq_len,
        "stat_width": next(iter(matches.values())).stat_width if matches else 0,
        "n_samples": len(samples),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for tm in matches.values():
            fh.write(json.dumps({"type": "match", **_token_record(tm)}) + "\n")
        for s in samples:
            rec = {
                "type": "sample",
                "match_id": s.base.match_id,
                "masked_positions": s.masked_positions.tolist(),
            }
            fh.write(json.dumps(rec) + "\n")


def load_mpp_corpus(path, vocab: Vocabulary) -> list[MaskedMatch]:
    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != MPP_FORMAT:
            raise ParseError(f"{path}: not an {MPP_FORMAT} file")
        seq_len = header["seq_len"]
        width = header["stat_width"]
        matches = {}
        samples = []
        for line in fh:
            rec = json.loads(line)
            if rec["type"] == "match":
                matches[rec["match_id"]] = _tokens_from_record(
                    rec, vocab, seq_len, width
                )
            else:
                base = matches.get(rec["match_id"])
                if base is None:
                    raise IntegrityError(
                        f"{path}: sample references unknown match {rec['match_id']}"
                    )
                positions = np.asarray(rec["masked_positions"], dtype=np.int64)
                samples.append(
                    MaskedMatch(
                        base=base,
                        masked_positions=positions,
                        targets=base.player_idx[positions].copy(),
                    )
                )
    return samples


def save_nmsp_dataset(examples, path, seq_len: int = SEQ_LEN) -> None:
    header = {
        "format": NMSP_FORMAT,
        "version": FORMAT_VERSION,
        "seq_len": seq_len,
        "stat_width": NMSP_WIDTH,
        "n_examples": len(examples),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for ex in examples:
            rec = {
                "type": "example",
                **_token_record(ex.tokens),
                "target": ex.target.tolist(),
            }
            fh.write(json.dumps(rec) + "\n")


def load_nmsp_dataset(path, vocab: Vocabulary) -> list[NmspExample]:
    examples = []
    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != NMSP_FORMAT:
            raise ParseError(f"{path}: not an {NMSP_FORMAT} file")
        seq_len = header["seq_len"]
        width = header["stat_width"]
        if width != NMSP_WIDTH:
            raise IntegrityError(
                f"{path}: stat width {width} != expected {NMSP_WIDTH}"
            )
        for line in fh:
            rec = json.loads(line)
            tokens = _tokens_from_record(rec, vocab, seq_len, width)
            examples.append(
                NmspExample(
                    tokens=tokens,
                    target=np.asarray(rec["target"], dtype=np.float64),
                )
            )
    return examples
