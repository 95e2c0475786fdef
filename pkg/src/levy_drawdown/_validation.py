"""Small argument-checking helpers shared across modules."""

from __future__ import annotations

import math

import numpy as np


def check_scalar(value, name: str, *, lower: float | None = None,
                 upper: float | None = None, strict_lower: bool = False,
                 strict_upper: bool = False) -> float:
    """Coerce ``value`` to a finite float and check its bounds.

    Parameters
    ----------
    value : object
        Candidate number.
    name : str
        Argument name used in error messages.
    lower, upper : float, optional
        Bounds. ``None`` disables the check on that side.
    strict_lower, strict_upper : bool
        Whether the corresponding bound is exclusive.

    Returns
    -------
    float
    """
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise TypeError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(out):
        raise ValueError(f"{name} must be finite, got {out}")
    if lower is not None:
        if (strict_lower and out <= lower) or (not strict_lower and out < lower):
            op = ">" if strict_lower else ">="
            raise ValueError(f"{name} must be {op} {lower}, got {out}")
    if upper is not None:
        if (strict_upper and out >= upper) or (not strict_upper and out > upper):
            op = "<" if strict_upper else "<="
            raise ValueError(f"{name} must be {op} {upper}, got {out}")
    return out


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise TypeError(f"{name} must be an integer, got {value!r}")
    out = int(value)
    if out < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {out}")
    return out


def as_float_array(x, name: str = "x") -> np.ndarray:
    """Return ``x`` as a float array of at least one dimension, rejecting NaN."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.isnan(arr).any():
        raise ValueError(f"{name} contains NaN")
    return arr


def scalar_or_array(values: np.ndarray, like):
    """Return a Python scalar when ``like`` was a scalar, else the array."""
    if np.ndim(like) == 0:
        v = np.asarray(values).reshape(-1)[0]
        return complex(v) if np.iscomplexobj(v) else float(v)
    return values
