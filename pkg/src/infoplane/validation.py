"""Input validation helpers.

Small checkers in the spirit of sklearn's ``check_array``: every public
entry point funnels its array arguments through these so error messages and
exception types stay consistent.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, ValidationError


def check_finite(arr: np.ndarray, name: str) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return arr


def as_matrix(x, name: str = "X", *, allow_1d: bool = False) -> np.ndarray:
    """Coerce to a finite float64 2-d array (C order).

    1-d input is treated as a single column when ``allow_1d`` is set,
    otherwise rejected.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        if not allow_1d:
            raise DimensionError(f"{name} must be 2-d, got shape {arr.shape}")
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-d, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError(f"{name} is empty")
    return check_finite(np.ascontiguousarray(arr), name)


def as_vector(x, name: str = "x", length: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValidationError(f"{name} is empty")
    if length is not None and arr.size != length:
        raise DimensionError(f"{name} must have length {length}, got {arr.size}")
    return check_finite(np.ascontiguousarray(arr), name)


def check_same_rows(*named_arrays: tuple[str, np.ndarray]) -> int:
    """Assert all arrays share the same first-axis length; returns it."""
    counts = {name: arr.shape[0] for name, arr in named_arrays}
    sizes = set(counts.values())
    if len(sizes) > 1:
        raise DimensionError(f"inconsistent sample counts: {counts}")
    return sizes.pop()


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    ivalue = int(value)
    if ivalue != value or ivalue < minimum:
        raise ValidationError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return ivalue
