"""Vocabulary, tokenization, masking augmentation and feature aggregation."""

from .aggregate import LAST_N, NMSP_WIDTH, aggregate_form_features, team_targets
from .corpus import (
    NmspExample,
    build_mpp_corpus,
    build_nmsp_dataset,
    group_rows_by_match,
    load_mpp_corpus,
    load_nmsp_dataset,
    save_mpp_corpus,
    save_nmsp_dataset,
    split_dataset,
    tokenize_matches,
)
from .tokens import SEQ_LEN, MaskedMatch, TokenizedMatch, augment_mpp, mask_count, tokenize
from .vocab import Vocabulary, build_vocabulary, load_vocabulary, save_vocabulary

__all__ = [
    "LAST_N",
    "MaskedMatch",
    "NMSP_WIDTH",
    "NmspExample",
    "SEQ_LEN",
    "TokenizedMatch",
    "Vocabulary",
    "aggregate_form_features",
    "augment_mpp",
    "build_mpp_corpus",
    "build_nmsp_dataset",
    "build_vocabulary",
    "group_rows_by_match",
    "load_mpp_corpus",
    "load_nmsp_dataset",
    "load_vocabulary",
    "mask_count",
    "save_mpp_corpus",
    "save_nmsp_dataset",
    "save_vocabulary",
    "split_dataset",
    "team_targets",
    "tokenize",
    "tokenize_matches",
]
