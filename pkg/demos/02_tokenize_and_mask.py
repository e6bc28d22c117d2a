"""Matches as token sequences: vocabulary, padding, masking augmentation.

Run: python3 demos/02_tokenize_and_mask.py
"""

import numpy as np

from matchformer import synth
from matchformer.features import (
    augment_mpp,
    build_vocabulary,
    mask_count,
    split_dataset,
    tokenize_matches,
)


def main():
    rows, sheets = synth.synth_league(n_teams=6, squad_size=12, n_rounds=6,
                                      seed=7)
    vocab = build_vocabulary(rows)
    print(f"{len(sheets)} matches, {len(rows)} player-match rows")
    print(f"vocabulary: {vocab.n_players} players + MASK + PAD "
          f"= {vocab.total_size} token ids")
    print(f"positions: {vocab.position_ids}")

    matches = tokenize_matches(rows, sheets, vocab)
    tm = matches[0]
    print(f"\nmatch {tm.match_id}: {tm.n_real} real tokens, "
          f"{tm.seq_len - tm.n_real} padding tokens, "
          f"stat width {tm.stat_width}")

    print("\nmask counts at 25%:",
          {n: mask_count(0.25, n) for n in (4, 22, 36, 38, 80)})

    variants = augment_mpp(tm, k=10, mask_rate=0.25, seed=0)
    print(f"{len(variants)} masked variants of {tm.match_id}; "
          f"distinct masked sets: "
          f"{len({tuple(v.masked_positions) for v in variants})}")
    v = variants[0]
    masked_input = v.masked_player_idx(vocab.mask_index)
    print("masked positions:", v.masked_positions.tolist())
    print("inputs at those positions:",
          masked_input[v.masked_positions].tolist(), "(all MASK id)",
          "targets:", v.targets.tolist())

    samples = [s for m in matches for s in augment_mpp(m, 10, 0.25, seed=0)]
    train, val = split_dataset(samples, 0.8, mode="random", seed=0)
    tokens = sum(m.n_real for m in matches) * 10
    print(f"\ncorpus: {len(samples)} samples "
          f"({len(train)} train / {len(val)} val), "
          f"{tokens} non-padding tokens")


if __name__ == "__main__":
    main()
