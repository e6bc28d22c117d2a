"""Command-line pipeline: ingest -> features -> train -> eval -> embeddings.

One flat key=value configuration file feeds every stage, with command-line
overrides; all randomness flows from a single seed. Every command writes a
run manifest listing input and artifact digests, so reruns with identical
inputs are byte-for-byte checkable.

Exit codes: 0 success, 1 usage/configuration, 2 data integrity, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytics, features, ingest, train
from .errors import ConfigError, IntegrityError, MatchformerError
from .manifest import RunManifest
from .model import HEAD_MPP, HEAD_NMSP, config_from_vocab, load_checkpoint
from .train import TrainConfig

# Defaults follow the documented training recipe for each stage.
CONFIG_DEFAULTS = {
    "mask_rate": 0.25,
    "augment": 10,
    "seq_len": 80,
    "split": 0.8,
    "batch_size": 256,
    "base_lr": 1e-4,
    "mpp_warmup_ratio": 0.0,
    "nmsp_warmup_ratio": 0.1,
    "mpp_weight_decay": 0.0,
    "nmsp_weight_decay": 0.01,
    "n_layers": 1,
    "dim": 64,
    "n_heads": 0,
    "ff_width": 0,
    "mlp_hidden": True,
    "use_team_embeddings": True,
    "precision": "float32",
    "eval_every_epochs": 1,
    "seed": 0,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; values parsed as JSON when possible."""
    config = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (part.strip() for part in line.split("=", 1))
            try:
                config[key] = json.loads(raw)
            except json.JSONDecodeError:
                config[key] = raw
    return config


def merge_config(file_path=None, **overrides) -> dict:
    config = dict(CONFIG_DEFAULTS)
    if file_path:
        config.update(read_config_file(file_path))
    for key, value in overrides.items():
        if value is not None:
            config[key] = value
    return config


# ---------------------------------------------------------------------------
# ingest


def cmd_ingest(args) -> int:
    events_dir = Path(args.events)
    lineups_dir = Path(args.lineups)
    adapter = ingest.get_adapter(args.adapter)
    event_files = sorted(p for p in events_dir.glob("*.json*") if p.is_file())
    if not event_files:
        raise ConfigError(f"no event files found in {events_dir}")

    meta = {}
    if args.matches:
        meta = ingest.statsbomb_match_meta(Path(args.matches).read_bytes())

    parsed = []
    dropped = 0
    for event_file in event_files:
        match_id = event_file.name.split(".", 1)[0]
        lineup_file = _matching_lineup(lineups_dir, event_file)
        result = adapter["parse_events"](event_file.read_bytes(), match_id)
        dropped += result.dropped
        if args.adapter == "statsbomb":
            sheet = adapter["parse_sheet"](
                lineup_file.read_bytes(), result.events, match_id,
                meta.get(match_id),
            )
        else:
            sheet = adapter["parse_sheet"](
                lineup_file.read_bytes(), result.events, match_id
            )
        parsed.append((sheet, result.events))

    orders = ingest.kickoff_order_map([sheet for sheet, _ in parsed])
    rows = []
    for sheet, events in parsed:
        rows.extend(
            ingest.compute_player_stats(events, sheet, orders[sheet.match_id])
        )
    if not args.keep_unknown_positions:
        ingest.fill_unknown_positions(rows)
    sheets = sorted((s for s, _ in parsed), key=lambda s: orders[s.match_id])
    ingest.export_dataset(rows, sheets, args.out)

    players = {r.player_id for r in rows}
    teams = {r.team_id for r in rows}
    print(
        f"{len(sheets)} matches, {len(players)} players, {len(teams)} teams "
        f"({dropped} raw records dropped)"
    )
    manifest = RunManifest(command="ingest", seed=0,
                           config={"adapter": args.adapter})
    manifest.add_input("events", events_dir)
    manifest.add_input("lineups", lineups_dir)
    manifest.add_artifact("dataset", args.out)
    manifest.save(Path(args.out).parent)
    return 0


def _matching_lineup(lineups_dir: Path, event_file: Path) -> Path:
    candidate = lineups_dir / event_file.name
    if candidate.exists():
        return candidate
    stem = event_file.name.split(".", 1)[0]
    matches = sorted(lineups_dir.glob(f"{stem}.*"))
    if not matches:
        raise IntegrityError(f"no lineup file for match {stem} in {lineups_dir}")
    return matches[0]


# ---------------------------------------------------------------------------
# features


def cmd_features(args) -> int:
    config = merge_config(
        args.config,
        mask_rate=args.mask_rate,
        augment=args.augment,
        seq_len=args.seq_len,
        split=args.split,
        seed=args.seed,
    )
    split_mode = args.split_mode or ("random" if args.task == "mpp" else "chronological")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows, sheets = ingest.load_dataset(args.dataset)
    vocab = features.build_vocabulary(rows)
    features.save_vocabulary(vocab, out_dir / "vocabulary.json")

    seed = int(config["seed"])
    if args.task == "mpp":
        samples = features.build_mpp_corpus(
            rows, sheets, vocab,
            k=int(config["augment"]),
            mask_rate=float(config["mask_rate"]),
            seed=seed,
            seq_len=int(config["seq_len"]),
        )
        train_split, val_split = features.split_dataset(
            samples, float(config["split"]), mode=split_mode, seed=seed
        )
        features.save_mpp_corpus(train_split, out_dir / "mpp_train.jsonl",
                                 seq_len=int(config["seq_len"]))
        features.save_mpp_corpus(val_split, out_dir / "mpp_val.jsonl",
                                 seq_len=int(config["seq_len"]))
        described = f"{len(samples)} masked samples"
    else:
        examples = features.build_nmsp_dataset(
            rows, sheets, vocab, seq_len=int(config["seq_len"])
        )
        for ex in examples:
            if ex.tokens.stat_width != features.NMSP_WIDTH:
                raise IntegrityError(
                    f"example {ex.match_id} has width {ex.tokens.stat_width}"
                )
        train_split, val_split = features.split_dataset(
            examples, float(config["split"]), mode=split_mode, seed=seed
        )
        features.save_nmsp_dataset(train_split, out_dir / "nmsp_train.jsonl",
                                   seq_len=int(config["seq_len"]))
        features.save_nmsp_dataset(val_split, out_dir / "nmsp_val.jsonl",
                                   seq_len=int(config["seq_len"]))
        described = f"{len(examples)} examples"

    split_info = {
        "task": args.task,
        "ratio": float(config["split"]),
        "mode": split_mode,
        "seed": seed,
        "n_train": len(train_split),
        "n_val": len(val_split),
    }
    with open(out_dir / "split.json", "w", encoding="utf-8") as fh:
        json.dump(split_info, fh, indent=1)
        fh.write("\n")
    print(
        f"{args.task}: {described} -> {len(train_split)} train / "
        f"{len(val_split)} val ({split_mode} split)"
    )
    manifest = RunManifest(command=f"features-{args.task}", seed=seed, config=config)
    manifest.add_input("dataset", args.dataset)
    for artifact in out_dir.iterdir():
        if artifact.name != "manifest.json":
            manifest.add_artifact(artifact.name, artifact)
    manifest.save(out_dir)
    return 0


# ---------------------------------------------------------------------------
# train


def _model_config(config: dict, vocab, task: str, stat_width: int):
    return config_from_vocab(
        vocab,
        n_layers=int(config["n_layers"]),
        dim=int(config["dim"]),
        n_heads=int(config["n_heads"]),
        ff_width=int(config["ff_width"]),
        stat_input_width=stat_width,
        use_team_embeddings=bool(config["use_team_embeddings"]),
        head=task,
        seq_len=int(config["seq_len"]),
        mlp_hidden=bool(config["mlp_hidden"]),
        dtype=str(config["precision"]),
    )


def _train_config(config: dict, model_config, task: str) -> TrainConfig:
    epochs = config.get("epochs")
    total_steps = config.get("total_steps")
    if epochs is None and total_steps is None:
        raise ConfigError("config must set epochs or total_steps")
    return TrainConfig(
        model=model_config,
        batch_size=int(config["batch_size"]),
        base_lr=float(config["base_lr"]),
        warmup_ratio=float(config[f"{task}_warmup_ratio"]),
        weight_decay=float(config[f"{task}_weight_decay"]),
        epochs=int(epochs) if epochs is not None else None,
        total_steps=int(total_steps) if total_steps is not None else None,
        seed=int(config["seed"]),
        task=task,
        init_checkpoint=config.get("init_checkpoint"),
        eval_every_epochs=int(config["eval_every_epochs"]),
    )


def cmd_train(args) -> int:
    config = merge_config(args.config, seed=args.seed)
    if args.no_team_embeddings:
        config["use_team_embeddings"] = False
    corpus_dir = Path(args.corpus)
    out_dir = Path(args.out)
    vocab = features.load_vocabulary(corpus_dir / "vocabulary.json")

    if args.task == "mpp":
        train_split = features.load_mpp_corpus(corpus_dir / "mpp_train.jsonl", vocab)
        val_split = features.load_mpp_corpus(corpus_dir / "mpp_val.jsonl", vocab)
        stat_width = train_split[0].base.stat_width
        if args.sweep:
            grid = _sweep_grid(args.sweep, config, vocab, stat_width)
            result = train.run_sweep(grid, (train_split, val_split), run_dir=out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            train.write_sweep_table(result["summary"], out_dir / "sweep_table.tsv")
            for row in result["summary"]:
                print(
                    f"{row['arch']}\tparams={row['params']}\t"
                    f"val_ce={row['val_cross_entropy']}\t{row['status']}"
                )
            report = None
        else:
            model_config = _model_config(config, vocab, HEAD_MPP, stat_width)
            train_cfg = _train_config(config, model_config, "mpp")
            _, report = train.pretrain_mpp((train_split, val_split), train_cfg,
                                           run_dir=out_dir)
    else:
        train_split = features.load_nmsp_dataset(corpus_dir / "nmsp_train.jsonl", vocab)
        val_split = features.load_nmsp_dataset(corpus_dir / "nmsp_val.jsonl", vocab)
        if args.from_checkpoint:
            config["init_checkpoint"] = args.from_checkpoint
        model_config = _model_config(
            config, vocab, HEAD_NMSP, features.NMSP_WIDTH
        )
        train_cfg = _train_config(config, model_config, "nmsp")
        _, report = train.finetune_nmsp((train_split, val_split), train_cfg,
                                        run_dir=out_dir)

    manifest_config = {k: v for k, v in config.items()}
    if report is not None:
        final = {k: v for k, v in report.final.items()}
        print(f"finished {report.total_steps} steps in {report.wall_time_s:.1f}s: {final}")
        manifest_config["wall_time_s"] = report.wall_time_s
    manifest = RunManifest(command=f"train-{args.task}", seed=int(config["seed"]),
                           config=manifest_config)
    manifest.add_input("corpus", corpus_dir)
    if args.from_checkpoint:
        manifest.add_input("checkpoint", args.from_checkpoint)
    for artifact in ("checkpoint", "metrics.jsonl", "sweep_table.tsv"):
        path = out_dir / artifact
        if path.exists():
            manifest.add_artifact(artifact, path)
    manifest.save(out_dir)
    return 0


def _sweep_grid(sweep_file, config, vocab, stat_width):
    with open(sweep_file, "r", encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"{sweep_file}: expected a non-empty JSON array")
    grid = []
    for entry in entries:
        merged = dict(config)
        merged.update(entry)
        model_config = _model_config(merged, vocab, HEAD_MPP, stat_width)
        grid.append(_train_config(merged, model_config, "mpp"))
    return grid


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args) -> int:
    params, model_config = load_checkpoint(args.checkpoint)
    corpus_dir = Path(args.corpus)
    vocab = features.load_vocabulary(corpus_dir / "vocabulary.json")
    examples = features.load_nmsp_dataset(corpus_dir / "nmsp_val.jsonl", vocab)
    rows, sheets = ingest.load_dataset(args.dataset)
    histories = analytics.build_team_histories(rows, sheets)
    sheet_by_id = {s.match_id: s for s in sheets}

    kept = []
    baseline_preds = []
    for ex in examples:
        sheet = sheet_by_id.get(ex.match_id)
        if sheet is None:
            raise IntegrityError(f"corpus match {ex.match_id} missing from dataset")
        forecast = analytics.baseline_for_match(histories, sheet, ex.kickoff_order)
        if forecast is None:
            continue
        kept.append(ex)
        baseline_preds.append(forecast)
    if not kept:
        raise IntegrityError("no forecastable matches in the evaluation split")

    data = train.nmsp_tensors(kept, dtype=np.dtype(model_config.dtype))
    targets = data.target.astype(np.float64)
    model_preds = train.predict_nmsp(params, model_config, data)
    model_metrics = train.nmsp_metrics_from_predictions(model_preds, targets)
    baseline_metrics = train.nmsp_metrics_from_predictions(
        np.stack(baseline_preds), targets
    )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    analytics.write_eval_table(
        model_metrics, baseline_metrics, out_dir / "eval_table.tsv"
    )
    improvement = analytics.pct_improvement(
        baseline_metrics["global_mse"], model_metrics["global_mse"]
    )
    print(
        f"evaluated {len(kept)} matches: model MSE {model_metrics['global_mse']:.2f}"
        f" vs baseline {baseline_metrics['global_mse']:.2f}"
        f" ({improvement:+.2f}% improvement)"
    )
    manifest = RunManifest(command="eval", seed=0, config={})
    manifest.add_input("checkpoint", args.checkpoint)
    manifest.add_input("corpus", corpus_dir)
    manifest.add_input("dataset", args.dataset)
    manifest.add_artifact("eval_table.tsv", out_dir / "eval_table.tsv")
    manifest.save(out_dir)
    return 0


# ---------------------------------------------------------------------------
# embeddings


def _load_embedding_inputs(args):
    params, model_config = load_checkpoint(args.checkpoint)
    vocab = features.load_vocabulary(args.vocab)
    rows, _ = ingest.load_dataset(args.dataset)
    counts = analytics.player_match_counts(rows)
    players = analytics.player_embedding_matrix(
        params, vocab, counts, source=str(args.checkpoint)
    )
    positions = analytics.position_embedding_matrix(
        params, vocab, source=str(args.checkpoint)
    )
    return players, positions, rows


def cmd_embeddings(args) -> int:
    players, positions, rows = _load_embedding_inputs(args)
    out = Path(args.out)
    if args.action == "similar":
        ranked = analytics.top_k_similar(
            args.player, players, k=args.k, min_matches=args.min_matches
        )
        analytics.write_ranking(ranked, out, header=("player", "cosine"))
        for player, score in ranked:
            print(f"{player}\t{score:.4f}")
    elif args.action == "position-rank":
        ranked = analytics.rank_players_for_position(
            args.position, players, positions, min_matches=args.min_matches
        )
        analytics.write_ranking(ranked[: args.k] if args.k else ranked, out,
                                header=("player", "cosine"))
        print(f"ranked {len(ranked)} players for {args.position}")
    elif args.action == "cluster":
        em = positions
        if not args.include_unknown:
            keep = [i for i, p in enumerate(em.ids)
                    if p != ingest.UNKNOWN_POSITION]
            em = analytics.EmbeddingMatrix(
                ids=[em.ids[i] for i in keep],
                vectors=em.vectors[keep],
                source=em.source,
            )
        assignments = analytics.cluster_positions(em, k=args.k, seed=args.seed)
        analytics.write_assignments(assignments, out)
        print(f"clustered {len(assignments)} positions into {args.k} groups")
    elif args.action == "cohesion":
        squads = analytics.team_squads(rows)
        if args.team:
            squads = {args.team: squads[args.team]}
        scores = {}
        for team, members in sorted(squads.items()):
            eligible = [p for p in members if players.count(p) >= args.min_matches]
            if len(eligible) >= 2:
                scores[team] = analytics.team_cohesion(eligible, players)
        analytics.write_cohesion(scores, out)
        for team, score in sorted(scores.items(), key=lambda kv: -kv[1].raw):
            print(f"{team}\t{score.raw:.4f}\t{score.normalized:.4f}")
    elif args.action == "heatmap":
        teams = [t.strip() for t in args.teams.split(",") if t.strip()]
        if len(teams) != 2:
            raise ConfigError("--teams takes exactly two comma-separated ids")
        ids = []
        for team in teams:
            ids.extend(analytics.most_frequent_players(rows, team, n=args.top))
        matrix = analytics.dissimilarity_matrix(ids, players)
        analytics.write_matrix(matrix, ids, out)
        print(f"wrote {matrix.shape[0]}x{matrix.shape[1]} dissimilarity matrix")
    else:
        raise ConfigError(f"unknown embeddings action {args.action!r}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="matchformer", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse event data into a statistics dataset")
    p.add_argument("--events", required=True)
    p.add_argument("--lineups", required=True)
    p.add_argument("--adapter", default="statsbomb")
    p.add_argument("--matches", help="season match-list file with kickoff dates")
    p.add_argument("--keep-unknown-positions", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("features", help="build corpora from a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--task", choices=("mpp", "nmsp"), required=True)
    p.add_argument("--config")
    p.add_argument("--mask-rate", type=float, dest="mask_rate")
    p.add_argument("--augment", type=int)
    p.add_argument("--seq-len", type=int, dest="seq_len")
    p.add_argument("--split", type=float)
    p.add_argument("--split-mode", choices=("random", "chronological"),
                   dest="split_mode")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="pre-train or fine-tune")
    p.add_argument("--task", choices=("mpp", "nmsp"), required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--from-checkpoint", dest="from_checkpoint")
    p.add_argument("--no-team-embeddings", action="store_true",
                   dest="no_team_embeddings")
    p.add_argument("--sweep", help="JSON list of config overrides, one run each")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="compare a model against the last-5 baseline")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--baseline", action="store_true",
                   help="accepted for symmetry; the baseline is always computed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("embeddings", help="similarity and clustering analyses")
    p.add_argument("action", choices=("similar", "position-rank", "cluster",
                                      "cohesion", "heatmap"))
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--player")
    p.add_argument("--position")
    p.add_argument("--team")
    p.add_argument("--teams", help="two team ids for heatmaps, comma separated")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--top", type=int, default=14)
    p.add_argument("--min-matches", type=int, default=10, dest="min_matches")
    p.add_argument("--include-unknown", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embeddings)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except MatchformerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
