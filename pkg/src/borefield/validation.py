"""Input validation helpers shared by the data types and estimators."""

import numpy as np

from .errors import ValidationError


def check_positive(name, value):
    if not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be finite and > 0, got {value!r}")
    return float(value)


def check_nonnegative(name, value):
    if not np.isfinite(value) or value < 0:
        raise ValidationError(f"{name} must be finite and >= 0, got {value!r}")
    return float(value)


def check_finite(name, value):
    if not np.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return float(value)


def check_int_at_least(name, value, minimum):
    if int(value) != value or value < minimum:
        raise ValidationError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def as_points_array(points, name="points"):
    """Coerce to a float array of shape (n, 2), validating finiteness."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1 and arr.size == 2:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError(f"{name} must have shape (n, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite coordinates")
    return arr


def as_float_vector(values, name="values"):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


class FailureCollector:
    """Accumulates validation failures so they can be reported together."""

    def __init__(self):
        self.failures = []

    def add(self, message):
        self.failures.append(message)

    def check(self, condition, message):
        if not condition:
            self.failures.append(message)
        return bool(condition)

    def raise_if_any(self):
        if self.failures:
            raise ValidationError(self.failures)
