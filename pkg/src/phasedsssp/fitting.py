"""Least-squares fits of ``b * n**c`` and ``b * log2(n)`` to (n, y) points.

Neither model carries an additive constant. The power law is fitted as a
straight line in log-log space; the logarithmic model is a regression of y on
log2(n) through the origin. Both residuals are sums of squared errors of
``ln y`` so that the two models are compared on the same scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FitModel:
    model: str  # "power" or "logarithmic"
    b: float
    c: float | None
    residual: float
    n_points: int

    def predict(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.float64)
        if self.model == "power":
            return self.b * n**self.c
        return self.b * np.log2(n)

    def formula(self) -> str:
        if self.model == "power":
            return f"{self.b:.3g} * n^{self.c:.3g}"
        return f"{self.b:.3g} * log2(n)"


@dataclass(frozen=True)
class FitResult:
    power: FitModel
    logarithmic: FitModel

    @property
    def best(self) -> FitModel:
        return self.power if self.power.residual <= self.logarithmic.residual else self.logarithmic


def _points(points) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("points must be a sequence of (n, y) pairs")
    if arr.shape[0] < 3:
        raise ValueError("need at least three points to fit")
    n, y = arr[:, 0], arr[:, 1]
    if np.any(n <= 1) or np.any(y <= 0) or not np.all(np.isfinite(arr)):
        raise ValueError("fits need n > 1 and y > 0")
    return n, y


def fit_power(points) -> FitModel:
    n, y = _points(points)
    x, ly = np.log(n), np.log(y)
    c, log_b = np.polyfit(x, ly, 1)
    resid = float(np.sum((ly - (log_b + c * x)) ** 2))
    return FitModel("power", float(np.exp(log_b)), float(c), resid, n.size)


def fit_logarithmic(points) -> FitModel:
    n, y = _points(points)
    x = np.log2(n)
    b = float(np.dot(x, y) / np.dot(x, x))
    resid = float(np.sum((np.log(y) - np.log(b * x)) ** 2))
    return FitModel("logarithmic", b, None, resid, n.size)


def fit_curves(points) -> FitResult:
    """Fit both models; ``.best`` is the one with the lower residual."""
    return FitResult(fit_power(points), fit_logarithmic(points))
