"""Shared test utilities: the finite-difference oracle and relative errors.

The finite-difference side only ever re-evaluates the forward function
under parameter perturbations; it never touches the reverse-mode machinery
it is used to check.
"""

import numpy as np


def central_difference(loss_fn, flat_param: np.ndarray, index: int, h: float) -> float:
    original = flat_param[index]
    flat_param[index] = original + h
    plus = float(loss_fn())
    flat_param[index] = original - h
    minus = float(loss_fn())
    flat_param[index] = original
    return (plus - minus) / (2.0 * h)


def fd_gradient(loss_fn, param_array: np.ndarray, h_scale: float = 1e-5,
                indices=None) -> tuple:
    """Central-difference gradient of ``loss_fn`` w.r.t. selected entries.

    Returns ``(indices, gradient_values)``. ``h`` per entry is
    ``h_scale * max(1, |value|)``.
    """
    flat = param_array.reshape(-1)
    if indices is None:
        indices = np.arange(flat.size)
    values = np.zeros(len(indices), dtype=np.float64)
    for j, i in enumerate(indices):
        h = h_scale * max(1.0, abs(float(flat[i])))
        values[j] = central_difference(loss_fn, flat, i, h)
    return indices, values


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Worst entry error relative to the larger gradient magnitude."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = max(np.max(np.abs(analytic), initial=0.0),
                np.max(np.abs(numeric), initial=0.0), 1e-8)
    return float(np.max(np.abs(analytic - numeric), initial=0.0) / denom)
