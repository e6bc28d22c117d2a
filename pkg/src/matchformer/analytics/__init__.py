"""Baseline forecasting, evaluation metrics and embedding analyses."""

from .baseline import WINDOW, baseline_for_match, baseline_last5, build_team_histories
from .clustering import cluster_positions, kmeans
from .embeddings import (
    DEFAULT_MIN_MATCHES,
    CohesionScore,
    EmbeddingMatrix,
    cosine,
    dissimilarity_matrix,
    most_frequent_players,
    player_embedding_matrix,
    player_match_counts,
    position_embedding_matrix,
    rank_players_for_position,
    team_cohesion,
    team_squads,
    top_k_similar,
)
from .reports import (
    EVAL_HEADER,
    eval_comparison_rows,
    write_assignments,
    write_cohesion,
    write_embeddings,
    write_eval_table,
    write_matrix,
    write_ranking,
)
from .scores import delta_diff_points, dispersion, pct_improvement

__all__ = [
    "CohesionScore",
    "DEFAULT_MIN_MATCHES",
    "EVAL_HEADER",
    "EmbeddingMatrix",
    "WINDOW",
    "baseline_for_match",
    "baseline_last5",
    "build_team_histories",
    "cluster_positions",
    "cosine",
    "delta_diff_points",
    "dispersion",
    "dissimilarity_matrix",
    "eval_comparison_rows",
    "kmeans",
    "most_frequent_players",
    "pct_improvement",
    "player_embedding_matrix",
    "player_match_counts",
    "position_embedding_matrix",
    "rank_players_for_position",
    "team_cohesion",
    "team_squads",
    "top_k_similar",
    "write_assignments",
    "write_cohesion",
    "write_embeddings",
    "write_eval_table",
    "write_matrix",
    "write_ranking",
]
