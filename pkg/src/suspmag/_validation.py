"""Small argument checks used by the dataclass constructors and estimators."""
import math

import numpy as np
from sklearn.utils.validation import check_array

from .errors import DomainError


def check_positive(name, value, error=DomainError):
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise error(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_non_negative(name, value, error=DomainError):
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise error(f"{name} must be a non-negative finite number, got {value!r}")
    return value


def check_interval(name, value, low, high, *, closed_low=True, closed_high=False, error=DomainError):
    value = float(value)
    ok_low = value >= low if closed_low else value > low
    ok_high = value <= high if closed_high else value < high
    if not (math.isfinite(value) and ok_low and ok_high):
        lb = "[" if closed_low else "("
        rb = "]" if closed_high else ")"
        raise error(f"{name} must lie in {lb}{low}, {high}{rb}, got {value!r}")
    return value


def check_column(X, name="X"):
    """Coerce 1-D data or a single-column 2-D array into a float vector."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr = check_array(arr, ensure_2d=True, dtype=float, input_name=name)
    if arr.shape[1] != 1:
        raise ValueError(f"{name} must have exactly one feature, got {arr.shape[1]}")
    return arr[:, 0]
