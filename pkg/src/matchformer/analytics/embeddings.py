"""Learned-embedding analyses: similarity retrieval, cohesion, dissimilarity.

All retrieval is an exact exhaustive scan over an immutable
:class:`EmbeddingMatrix` snapshot; ranking ties break by id order.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, IntegrityError

DEFAULT_MIN_MATCHES = 10


@dataclass(eq=False)
class EmbeddingMatrix:
    """Rows of D-dimensional vectors keyed by entity id."""

    ids: list
    vectors: np.ndarray  # [n, d] float64
    source: str = ""
    match_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.ids):
            raise IntegrityError(
                f"vectors of shape {self.vectors.shape} do not match "
                f"{len(self.ids)} ids"
            )
        if self.vectors.shape[0] < 1:
            raise IntegrityError("embedding matrix needs at least one row")
        if not np.all(np.isfinite(self.vectors)):
            raise IntegrityError("embedding matrix contains non-finite values")
        self._index = {e: i for i, e in enumerate(self.ids)}
        if len(self._index) != len(self.ids):
            raise IntegrityError("duplicate ids in embedding matrix")

    def row(self, entity_id) -> np.ndarray:
        try:
            return self.vectors[self._index[entity_id]]
        except KeyError:
            raise IntegrityError(f"unknown id {entity_id!r}") from None

    def count(self, entity_id) -> int:
        return int(self.match_counts.get(entity_id, 0))

    def __len__(self) -> int:
        return len(self.ids)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two vectors; zero vectors are a domain error."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ConfigError("cosine similarity is undefined for zero vectors")
    return float(np.dot(a, b) / (na * nb))


def _eligible(em: EmbeddingMatrix, min_matches: int, exclude=None) -> list:
    out = [
        i
        for i, entity in enumerate(em.ids)
        if entity != exclude and em.count(entity) >= min_matches
    ]
    if not out:
        raise ConfigError(
            f"no candidates left after the >= {min_matches} appearances filter"
        )
    return out


def _ranked(em: EmbeddingMatrix, query_vec: np.ndarray, candidates: list) -> list:
    scored = [(cosine(query_vec, em.vectors[i]), i) for i in candidates]
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [(em.ids[i], score) for score, i in scored]


def top_k_similar(
    query_id,
    em: EmbeddingMatrix,
    k: int = 10,
    min_matches: int = DEFAULT_MIN_MATCHES,
) -> list:
    """The ``k`` nearest embeddings to ``query_id`` by cosine similarity.

    Candidates with fewer than ``min_matches`` recorded appearances are
    skipped and the query never matches itself. Saturates at the candidate
    pool size.
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    query_vec = em.row(query_id)
    ranked = _ranked(em, query_vec, _eligible(em, min_matches, exclude=query_id))
    return ranked[:k]


def rank_players_for_position(
    position_id,
    players: EmbeddingMatrix,
    positions: EmbeddingMatrix,
    min_matches: int = DEFAULT_MIN_MATCHES,
) -> list:
    """All eligible players ranked by similarity to one position vector."""
    query_vec = positions.row(position_id)
    return _ranked(players, query_vec, _eligible(players, min_matches))


@dataclass
class CohesionScore:
    """Squad-size-averaged pairwise similarity, with a [-1, 1] variant."""

    raw: float  # sum of pairwise similarities / squad size
    normalized: float  # raw / (squad size - 1)
    squad_size: int


def team_cohesion(player_ids, em: EmbeddingMatrix) -> CohesionScore:
    """Average cumulative similarity of each squad player to their teammates."""
    ids = list(player_ids)
    if len(ids) < 2:
        raise ConfigError(f"cohesion needs a squad of >= 2, got {len(ids)}")
    vectors = np.stack([em.row(p) for p in ids])
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms == 0.0):
        raise ConfigError("cosine similarity is undefined for zero vectors")
    unit = vectors / norms[:, None]
    sims = unit @ unit.T
    total = float(sims.sum() - np.trace(sims))
    raw = total / len(ids)
    return CohesionScore(raw=raw, normalized=raw / (len(ids) - 1),
                         squad_size=len(ids))


def dissimilarity_matrix(player_ids, em: EmbeddingMatrix) -> np.ndarray:
    """Symmetric ``1 - cosine`` matrix with a zero diagonal."""
    ids = list(player_ids)
    if len(ids) < 2:
        raise ConfigError(f"need >= 2 ids for a dissimilarity matrix, got {len(ids)}")
    n = len(ids)
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            value = 1.0 - cosine(em.row(ids[i]), em.row(ids[j]))
            out[i, j] = value
            out[j, i] = value
    return out


# ---------------------------------------------------------------------------
# building matrices from artifacts


def player_match_counts(rows) -> dict:
    """Participating appearances per player over a dataset."""
    counts = Counter()
    for row in rows:
        if row.participated:
            counts[row.player_id] += 1
    return dict(counts)


def team_squads(rows) -> dict:
    """Players with at least one participating appearance per team."""
    squads = defaultdict(set)
    for row in rows:
        if row.participated:
            squads[row.team_id].add(row.player_id)
    return {team: sorted(players) for team, players in squads.items()}


def most_frequent_players(rows, team_id, n: int = 14) -> list:
    """The team's ``n`` most frequent participants (ties by id)."""
    counts = Counter()
    for row in rows:
        if row.participated and row.team_id == team_id:
            counts[row.player_id] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [player for player, _ in ranked[:n]]


def player_embedding_matrix(params, vocab, match_counts=None,
                            source: str = "player_table") -> EmbeddingMatrix:
    """Input player-id embeddings as an analysis snapshot.

    Reserved MASK/PAD rows are excluded; these are the match-independent
    vectors used by all similarity analyses.
    """
    table = params["player_table"].data.astype(np.float64)
    return EmbeddingMatrix(
        ids=list(vocab.player_ids),
        vectors=table[: vocab.n_players],
        source=source,
        match_counts=dict(match_counts or {}),
    )


def position_embedding_matrix(params, vocab,
                              source: str = "position_table") -> EmbeddingMatrix:
    """Input position embeddings (reserved padding row excluded)."""
    table = params["position_table"].data.astype(np.float64)
    return EmbeddingMatrix(
        ids=list(vocab.position_ids),
        vectors=table[: len(vocab.position_ids)],
        source=source,
    )
