"""Log-log scaling-exponent fits shared by metrology and the sweep harness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ValidationError


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of log10(y) = slope * log10(x) + intercept."""

    slope: float
    intercept: float
    max_abs_residual: float
    n_points: int

    def prefactor(self) -> float:
        return float(10.0**self.intercept)


def fit_power_law(x, y) -> FitResult:
    """Unweighted least squares on (log10 x, log10 y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = np.isfinite(x) & np.isfinite(y)
    x, y = x[mask], y[mask]
    if len(x) < 3:
        raise InsufficientDataError(f"need >= 3 valid points, got {len(x)}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValidationError("power-law fit requires positive x and y")
    lx, ly = np.log10(x), np.log10(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    residuals = ly - (slope * lx + intercept)
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        max_abs_residual=float(np.max(np.abs(residuals))),
        n_points=int(len(x)),
    )


def forced_slope_prefactor(x, y, slope: float) -> float:
    """Geometric-mean prefactor c of y = c * x**slope with the slope pinned."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValidationError("prefactor extraction requires positive data")
    return float(np.exp(np.mean(np.log(y) - slope * np.log(x))))
