"""Next-match team statistics: fine-tuned model vs the last-5 baseline.

Pre-trains on masked players, swaps the head, fine-tunes on aggregated form
features and compares against forecasting by averaging each team's previous
five matches.

Run: python3 demos/04_next_match_prediction.py  (about two minutes)
"""

import numpy as np

from matchformer import analytics, synth
from matchformer.features import (
    NMSP_WIDTH,
    build_mpp_corpus,
    build_nmsp_dataset,
    build_vocabulary,
    split_dataset,
)
from matchformer.model import config_from_vocab
from matchformer.train import (
    TrainConfig,
    finetune_nmsp,
    nmsp_metrics_from_predictions,
    nmsp_tensors,
    predict_nmsp,
    pretrain_mpp,
)


def main():
    rows, sheets = synth.synth_league(n_teams=64, squad_size=12, n_rounds=14,
                                      seed=5, scale=0.3, opponent_effect=0.6)
    vocab = build_vocabulary(rows)
    examples = build_nmsp_dataset(rows, sheets, vocab)
    train_split, val_split = split_dataset(examples, 0.8, mode="chronological")
    print(f"{len(examples)} matches -> {len(train_split)} train / "
          f"{len(val_split)} validation (chronological)")

    histories = analytics.build_team_histories(rows, sheets)
    sheet_by_id = {s.match_id: s for s in sheets}
    forecasts = [
        analytics.baseline_for_match(histories, sheet_by_id[ex.match_id],
                                     ex.kickoff_order)
        for ex in val_split
    ]
    targets = np.stack([ex.target for ex in val_split])
    baseline = nmsp_metrics_from_predictions(np.stack(forecasts), targets)

    mpp_model = config_from_vocab(vocab, n_layers=1, dim=32, head="mpp",
                                  stat_input_width=39, mlp_hidden=False)
    mpp_config = TrainConfig(model=mpp_model, batch_size=64, base_lr=1e-3,
                             epochs=40, seed=0, task="mpp",
                             eval_every_epochs=40)
    corpus = split_dataset(
        build_mpp_corpus(rows, sheets, vocab, k=2, mask_rate=0.25, seed=0),
        0.8, mode="random", seed=0,
    )
    backbone, report = pretrain_mpp(corpus, mpp_config)
    print(f"pre-training: val top-1 {report.final['val_top1']:.3f}")

    nmsp_model = config_from_vocab(vocab, n_layers=1, dim=32, head="nmsp",
                                   stat_input_width=NMSP_WIDTH,
                                   mlp_hidden=False)
    nmsp_config = TrainConfig(model=nmsp_model, batch_size=32, base_lr=3e-3,
                              warmup_ratio=0.1, weight_decay=0.01, epochs=40,
                              seed=0, task="nmsp", eval_every_epochs=10)
    tuned, report = finetune_nmsp((train_split, val_split), nmsp_config,
                                  pretrained=(backbone, mpp_model))
    for r in report.records:
        print(f"  step {r['step']:>4}: train {r['train_loss']:>8.1f} "
              f"val {r['val_global_mse']:>8.1f}")

    preds = predict_nmsp(tuned, nmsp_model, nmsp_tensors(val_split, np.float32))
    model_metrics = nmsp_metrics_from_predictions(preds, targets)
    improvement = analytics.pct_improvement(baseline["global_mse"],
                                            model_metrics["global_mse"])
    print(f"\nglobal MSE: model {model_metrics['global_mse']:.1f} "
          f"vs baseline {baseline['global_mse']:.1f} "
          f"({improvement:+.2f}% improvement)")

    print(f"\n{'stat':24s} {'baseline rmse|d':>16s} {'model rmse|d':>16s} "
          f"{'d diff':>7s}")
    for b, m in zip(baseline["per_stat"], model_metrics["per_stat"]):
        diff = ("-" if b["delta"] is None or m["delta"] is None
                else f"{analytics.delta_diff_points(b['delta'], m['delta']):+d}")
        fmt = lambda e: (f"{e['rmse']:.2f}|" +
                         ("-" if e["delta"] is None else f"{e['delta']:.2f}"))
        print(f"{b['stat']:24s} {fmt(b):>16s} {fmt(m):>16s} {diff:>7s}")


if __name__ == "__main__":
    main()
