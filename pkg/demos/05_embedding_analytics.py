"""What the learned embeddings know: retrieval, clustering, cohesion.

Pre-trains briefly on a synthetic league, then runs every embedding
analysis: similar-player retrieval, position ranking, position clustering,
team cohesion and a dissimilarity matrix.

Run: python3 demos/05_embedding_analytics.py  (about a minute)
"""

import numpy as np

from matchformer import analytics, synth
from matchformer.features import build_mpp_corpus, build_vocabulary, split_dataset
from matchformer.model import config_from_vocab
from matchformer.train import TrainConfig, pretrain_mpp


def main():
    rows, sheets = synth.synth_league(n_teams=8, squad_size=12, n_rounds=12,
                                      seed=13, opponent_effect=0.4)
    vocab = build_vocabulary(rows)
    corpus = split_dataset(
        build_mpp_corpus(rows, sheets, vocab, k=4, mask_rate=0.25, seed=0),
        0.8, mode="random", seed=0,
    )
    model = config_from_vocab(vocab, n_layers=1, dim=32, head="mpp",
                              stat_input_width=39, mlp_hidden=False)
    config = TrainConfig(model=model, batch_size=64, base_lr=1e-3, epochs=60,
                         seed=0, task="mpp", eval_every_epochs=60)
    params, report = pretrain_mpp(corpus, config)
    print(f"pre-trained: val top-1 {report.final['val_top1']:.3f}")

    counts = analytics.player_match_counts(rows)
    players = analytics.player_embedding_matrix(params, vocab, counts)
    positions = analytics.position_embedding_matrix(params, vocab)

    query = "T00P10"  # a striker of team T00
    print(f"\nten most similar players to {query}:")
    for player, score in analytics.top_k_similar(query, players, k=10,
                                                 min_matches=8):
        print(f"  {player}  {score:+.3f}")

    print("\ntop five players for the striker position:")
    ranked = analytics.rank_players_for_position("ST", players, positions,
                                                 min_matches=8)
    for player, score in ranked[:5]:
        print(f"  {player}  {score:+.3f}")

    for k in (2, 3):
        assignments = analytics.cluster_positions(positions, k=k, seed=0)
        groups = {}
        for position, label in assignments.items():
            groups.setdefault(label, []).append(position)
        print(f"\npositions clustered into {k} groups:")
        for label in sorted(groups):
            print(f"  group {label}: {sorted(groups[label])}")

    print("\nteam cohesion (average pairwise similarity per squad):")
    squads = analytics.team_squads(rows)
    scores = {
        team: analytics.team_cohesion(members, players)
        for team, members in sorted(squads.items())
    }
    for team, score in sorted(scores.items(), key=lambda kv: -kv[1].raw):
        print(f"  {team}: {score.raw:+.3f} (normalized {score.normalized:+.3f})")

    ids = (analytics.most_frequent_players(rows, "T00", n=6)
           + analytics.most_frequent_players(rows, "T01", n=6))
    matrix = analytics.dissimilarity_matrix(ids, players)
    print(f"\ndissimilarity matrix over {len(ids)} players "
          f"(first team block vs second):")
    within_a = matrix[:6, :6][np.triu_indices(6, k=1)].mean()
    within_b = matrix[6:, 6:][np.triu_indices(6, k=1)].mean()
    across = matrix[:6, 6:].mean()
    print(f"  mean within {ids[0][:3]}: {within_a:.3f}   "
          f"within {ids[6][:3]}: {within_b:.3f}   across: {across:.3f}")


if __name__ == "__main__":
    main()
