"""Scalar comparison metrics used by the evaluation reports."""

from __future__ import annotations

from ..errors import ConfigError


def dispersion(rmse: float, target_mean: float):
    """Scale-free error: RMSE divided by the mean of the true statistic.

    Undefined (None) when the mean is not positive.
    """
    if rmse < 0:
        raise ConfigError(f"rmse must be >= 0, got {rmse}")
    if target_mean <= 0:
        return None
    return rmse / target_mean


def pct_improvement(baseline_mse: float, model_mse: float) -> float:
    """Percentage MSE reduction relative to the baseline."""
    if baseline_mse <= 0:
        raise ConfigError(f"baseline MSE must be positive, got {baseline_mse}")
    return 100.0 * (baseline_mse - model_mse) / baseline_mse


def delta_diff_points(delta_baseline: float, delta_model: float) -> int:
    """Signed dispersion difference in integer percentage points.

    Positive values mean the model improves on the baseline.
    """
    if delta_baseline is None or delta_model is None:
        raise ConfigError("dispersion difference needs two defined values")
    return round(100.0 * (delta_baseline - delta_model))
