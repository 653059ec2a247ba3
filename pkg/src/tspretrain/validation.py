"""Input validation helpers.

Small checks shared by the library and the estimator wrappers; they raise
package exceptions with messages that name the offending argument.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DataShapeError, InvalidConfigError


def check_series(x, name: str = "series") -> np.ndarray:
    """Validate a channels x time matrix: 2-D, numeric, all finite."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise DataShapeError(f"{name} must be 2-D (channels x time), got ndim={arr.ndim}")
    if arr.size == 0:
        raise DataShapeError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise DataShapeError(f"{name} contains non-finite values")
    return arr


def check_series_list(X, name: str = "X") -> list[np.ndarray]:
    """Validate a collection of series sharing one channel count."""
    if isinstance(X, np.ndarray) and X.ndim == 3:
        X = list(X)
    if not isinstance(X, Sequence) or len(X) == 0:
        raise DataShapeError(f"{name} must be a non-empty sequence of 2-D arrays")
    out = [check_series(s, name=f"{name}[{i}]") for i, s in enumerate(X)]
    channels = {s.shape[0] for s in out}
    if len(channels) != 1:
        raise DataShapeError(f"{name} mixes channel counts: {sorted(channels)}")
    return out


def check_labels(y, n: int, name: str = "y") -> np.ndarray:
    arr = np.asarray(y)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise DataShapeError(f"{name} must be 1-D with length {n}, got shape {arr.shape}")
    return arr.astype(np.int64)


def check_square_matrix(x, name: str = "scores") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DataShapeError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataShapeError(f"{name} contains non-finite values")
    return arr


def check_positive(value, name: str):
    if not value > 0:
        raise InvalidConfigError(f"{name} must be > 0, got {value!r}")
    return value


def check_in_open_unit_interval(value: float, name: str) -> float:
    if not 0.0 < value < 1.0:
        raise InvalidConfigError(f"{name} must lie strictly in (0, 1), got {value!r}")
    return float(value)
