"""Training loops, metrics and sweeps."""

from .batches import MppTensors, NmspTensors, batch_slices, mpp_tensors, nmsp_tensors
from .loop import RunReport, TrainConfig, finetune_nmsp, pretrain_mpp, write_metrics_log
from .metrics import (
    evaluate_mpp,
    evaluate_nmsp,
    mpp_metrics_from_logit_rows,
    nmsp_metrics_from_predictions,
    predict_nmsp,
)
from .sweep import SWEEP_COLUMNS, run_sweep, write_sweep_table

__all__ = [
    "MppTensors",
    "NmspTensors",
    "RunReport",
    "SWEEP_COLUMNS",
    "TrainConfig",
    "batch_slices",
    "evaluate_mpp",
    "evaluate_nmsp",
    "finetune_nmsp",
    "mpp_metrics_from_logit_rows",
    "mpp_tensors",
    "nmsp_metrics_from_predictions",
    "nmsp_tensors",
    "predict_nmsp",
    "pretrain_mpp",
    "run_sweep",
    "write_metrics_log",
    "write_sweep_table",
]
