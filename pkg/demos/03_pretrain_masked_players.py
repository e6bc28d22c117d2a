"""Masked-player pre-training on a synthetic league, with a small sweep.

Trains a one-layer model to recover masked player identities and prints the
metric trajectory, then compares two architectures at equal steps.

Run: python3 demos/03_pretrain_masked_players.py  (about a minute)
"""

import numpy as np

from matchformer import synth, train
from matchformer.features import build_mpp_corpus, build_vocabulary, split_dataset
from matchformer.model import config_from_vocab
from matchformer.train import TrainConfig, pretrain_mpp, run_sweep


def main():
    rows, sheets = synth.synth_league(n_teams=8, squad_size=12, n_rounds=14,
                                      seed=21, opponent_effect=0.4)
    vocab = build_vocabulary(rows)
    samples = build_mpp_corpus(rows, sheets, vocab, k=6, mask_rate=0.25, seed=0)
    corpus = split_dataset(samples, 0.8, mode="random", seed=0)
    print(f"{len(samples)} samples over {vocab.total_size} token ids")

    def config(dim, epochs, seed=0):
        model = config_from_vocab(vocab, n_layers=1, dim=dim, head="mpp",
                                  stat_input_width=39, mlp_hidden=False)
        return TrainConfig(model=model, batch_size=64, base_lr=1e-3,
                           epochs=epochs, seed=seed, task="mpp",
                           eval_every_epochs=max(1, epochs // 6))

    _, report = pretrain_mpp(corpus, config(dim=32, epochs=120))
    print("\nstep  train_ce  val_ce  top1   top3")
    for r in report.records:
        print(f"{r['step']:>5} {r['train_loss']:>8.3f} {r['val_loss']:>7.3f} "
              f"{r['val_top1']:>6.3f} {r['val_top3']:>6.3f}")
    random_ce = np.log(vocab.total_size)
    print(f"(uniform guessing: cross-entropy {random_ce:.3f}, "
          f"top-1 {1 / vocab.total_size:.4f})")

    print("\narchitecture sweep at equal steps:")
    result = run_sweep([config(16, 40), config(32, 40), config(64, 40)], corpus)
    print(f"{'arch':8s} {'params':>8s} {'val_ce':>8s} {'top1':>6s}")
    for row in result["summary"]:
        print(f"{row['arch']:8s} {row['params']:>8d} "
              f"{row['val_cross_entropy']:>8.3f} {row['val_top1']:>6.3f}")


if __name__ == "__main__":
    main()
