from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .exceptions import DomainError


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual: float
    count: int


def fit_linear(x: Iterable[float], y: Iterable[float]) -> FitResult:
    """Least-squares line through (x, y)."""
    x = np.asarray(list(x), dtype=float)
    y = np.asarray(list(y), dtype=float)

    if x.shape != y.shape:
        raise DomainError('x and y must have the same length')
    if x.size < 2:
        raise DomainError('at least two points are needed for a fit')
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError('fit data must be finite')

    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.linalg.norm(design @ np.array([slope, intercept]) - y))

    return FitResult(float(slope), float(intercept), residual, int(x.size))


def fit_log_linear(pairs: Iterable[tuple[float, float]]) -> FitResult:
    """
    Fits ln y = slope·x + intercept. Used to extract exponential rates
    (Harnack constants, decay rates) from measured sequences.
    """
    pairs = list(pairs)
    if len(pairs) < 2:
        raise DomainError('at least two points are needed for a fit')

    x, y = np.asarray(pairs, dtype=float).T
    if np.any(y <= 0):
        raise DomainError('log-linear fit requires positive y values')

    return fit_linear(x, np.log(y))
