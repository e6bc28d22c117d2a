"""Architecture / ablation sweeps over a shared corpus."""

from __future__ import annotations

from ..errors import MatchformerError
from ..model import init_model, param_count
from .loop import TrainConfig, pretrain_mpp

SWEEP_COLUMNS = (
    "arch",
    "params",
    "team_embeddings",
    "steps",
    "val_cross_entropy",
    "val_top1",
    "val_top3",
    "status",
)


def run_sweep(grid, corpus, run_dir=None) -> dict:
    """Pre-train every config in ``grid`` on the same corpus.

    Individual failures are recorded and do not stop the sweep. Returns
    ``{"runs": [...], "summary": [...]}`` with the summary ranked by
    validation cross-entropy (failures last).
    """
    runs = []
    rows = []
    for i, config in enumerate(grid):
        if not isinstance(config, TrainConfig):
            raise MatchformerError(f"sweep entries must be TrainConfig, got {config!r}")
        n_params = param_count(init_model(config.model, config.seed))
        row = {
            "arch": config.model.arch_name,
            "params": n_params,
            "team_embeddings": config.model.use_team_embeddings,
        }
        sub_dir = None if run_dir is None else f"{run_dir}/run{i:02d}"
        try:
            _, report = pretrain_mpp(corpus, config, run_dir=sub_dir)
            runs.append(report)
            row.update(
                steps=report.total_steps,
                val_cross_entropy=report.final.get("val_loss"),
                val_top1=report.final.get("val_top1"),
                val_top3=report.final.get("val_top3"),
                status="ok",
            )
        except MatchformerError as exc:
            runs.append(None)
            row.update(
                steps=None,
                val_cross_entropy=None,
                val_top1=None,
                val_top3=None,
                status=f"error: {exc}",
            )
        rows.append(row)
    ranked = sorted(
        rows,
        key=lambda r: (
            r["val_cross_entropy"] is None,
            r["val_cross_entropy"] if r["val_cross_entropy"] is not None else 0.0,
        ),
    )
    return {"runs": runs, "summary": ranked}


def write_sweep_table(summary_rows, path) -> None:
    """Tab-separated sweep summary, one row per configuration."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(SWEEP_COLUMNS) + "\n")
        for row in summary_rows:
            fh.write("\t".join(_cell(row.get(c)) for c in SWEEP_COLUMNS) + "\n")


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)
