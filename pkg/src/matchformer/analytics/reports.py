"""Plot-ready file emission: tab-separated tables with labeled axes."""

from __future__ import annotations

import numpy as np

from .scores import delta_diff_points, pct_improvement

EVAL_HEADER = ("stat", "baseline_rmse|delta", "model_rmse|delta", "pct_delta_diff")


def _fmt(value, digits=6) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.{digits}f}"
    return str(value)


def write_ranking(ranked, path, header=("id", "score")) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for entity, score in ranked:
            fh.write(f"{entity}\t{score:.6f}\n")


def write_assignments(assignments: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("position\tcluster\n")
        for entity, label in assignments.items():
            fh.write(f"{entity}\t{label}\n")


def write_matrix(matrix: np.ndarray, labels, path) -> None:
    """Labeled square matrix; first column and header row carry the ids."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(["id"] + [str(l) for l in labels]) + "\n")
        for label, row in zip(labels, matrix):
            fh.write("\t".join([str(label)] + [f"{v:.6f}" for v in row]) + "\n")


def write_embeddings(em, path) -> None:
    """Ids plus vector components, with a provenance header line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# source={em.source} dim={em.vectors.shape[1]} n={len(em)}\n")
        dim = em.vectors.shape[1]
        fh.write("\t".join(["id", "matches"] + [f"e{i}" for i in range(dim)]) + "\n")
        for entity, vec in zip(em.ids, em.vectors):
            cells = [str(entity), str(em.count(entity))]
            cells += [f"{v:.8e}" for v in vec]
            fh.write("\t".join(cells) + "\n")


def write_cohesion(scores: dict, path) -> None:
    """Per-team cohesion, highest raw score first."""
    ranked = sorted(scores.items(), key=lambda kv: -kv[1].raw)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("team\tsquad_size\tcohesion\tcohesion_normalized\n")
        for team, score in ranked:
            fh.write(
                f"{team}\t{score.squad_size}\t{score.raw:.6f}\t"
                f"{score.normalized:.6f}\n"
            )


def eval_comparison_rows(model_metrics: dict, baseline_metrics: dict) -> list:
    """Join model and baseline per-stat metrics into report rows."""
    by_stat = {entry["stat"]: entry for entry in baseline_metrics["per_stat"]}
    rows = []
    for entry in model_metrics["per_stat"]:
        base = by_stat[entry["stat"]]
        if entry["delta"] is None or base["delta"] is None:
            diff = None
        else:
            diff = delta_diff_points(base["delta"], entry["delta"])
        rows.append(
            {
                "stat": entry["stat"],
                "baseline_rmse": base["rmse"],
                "baseline_delta": base["delta"],
                "model_rmse": entry["rmse"],
                "model_delta": entry["delta"],
                "pct_delta_diff": diff,
            }
        )
    return rows


def write_eval_table(model_metrics: dict, baseline_metrics: dict, path) -> None:
    """The per-statistic comparison table plus a global summary block."""
    rows = eval_comparison_rows(model_metrics, baseline_metrics)
    improvement = pct_improvement(
        baseline_metrics["global_mse"], model_metrics["global_mse"]
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(EVAL_HEADER) + "\n")
        for row in rows:
            base = f"{_fmt(row['baseline_rmse'], 2)}|{_fmt(row['baseline_delta'], 2)}"
            model = f"{_fmt(row['model_rmse'], 2)}|{_fmt(row['model_delta'], 2)}"
            diff = "-" if row["pct_delta_diff"] is None else f"{row['pct_delta_diff']:+d}"
            fh.write(f"{row['stat']}\t{base}\t{model}\t{diff}\n")
        fh.write("\n")
        fh.write(f"global_mse_baseline\t{baseline_metrics['global_mse']:.2f}\n")
        fh.write(f"global_mse_model\t{model_metrics['global_mse']:.2f}\n")
        fh.write(f"pct_improvement\t{improvement:.2f}\n")
