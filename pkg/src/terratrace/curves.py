"""Signature curves: per-date mean NDVI over a set of cell series, display
normalization, daily interpolation, and stable polynomial least squares.

Classification thresholds operate on raw NDVI, so the mean curve keeps raw
units; 0-1 normalization exists only for display and image rendering.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from terratrace.store import CellSeries


class CurveError(ValueError):
    """Empty input, degenerate normalization, or an underdetermined fit."""


@dataclass(frozen=True)
class PolyFit:
    """Least-squares polynomial in the scaled time basis.

    ``coeffs[k]`` multiplies ``t**k`` where ``t`` is the day number mapped
    affinely from [t0, t1] onto [-1, 1]; the scaling keeps the Vandermonde
    system well-conditioned up to degree 12.
    """

    degree: int
    coeffs: tuple[float, ...]
    t0: float
    t1: float
    rmse: float

    def scale(self, day: float) -> float:
        return (2.0 * day - (self.t0 + self.t1)) / (self.t1 - self.t0)

    def covers(self, day: float) -> bool:
        return self.t0 <= day <= self.t1

    def to_dict(self) -> dict:
        return {"degree": self.degree, "coeffs": list(self.coeffs),
                "t0": self.t0, "t1": self.t1, "rmse": self.rmse}


@dataclass(frozen=True)
class SignatureCurve:
    """Mean NDVI per day over the contributing cells, sorted by day."""

    days: np.ndarray  # int, strictly increasing
    values: np.ndarray  # float64
    contributing_cells: int = 1
    fit: PolyFit | None = None

    def __len__(self) -> int:
        return len(self.days)

    @property
    def points(self) -> list[tuple[int, float]]:
        return [(int(d), float(v)) for d, v in zip(self.days, self.values)]

    @classmethod
    def from_points(cls, points, contributing_cells: int = 1) -> "SignatureCurve":
        pts = sorted((int(d), float(v)) for d, v in points)
        days = np.array([p[0] for p in pts], dtype=np.int64)
        if len(np.unique(days)) != len(days):
            raise CurveError("duplicate day numbers in curve")
        values = np.array([p[1] for p in pts], dtype=np.float64)
        return cls(days, values, contributing_cells)

    def with_fit(self, fit: PolyFit) -> "SignatureCurve":
        return replace(self, fit=fit)

    def to_dict(self) -> dict:
        return {
            "points": [[int(d), float(v)] for d, v in zip(self.days, self.values)],
            "fit": self.fit.to_dict() if self.fit else None,
            "contributing_cells": self.contributing_cells,
        }


def mean_curve(series: list[CellSeries]) -> SignatureCurve:
    """Per-day mean over the cells that have a sample that day.

    Raw ndvi <= 0 samples are excluded before averaging (bare soil / cloud
    artifacts); days where nothing survives are omitted entirely.
    """
    day_arrays = [s.days for s in series if len(s)]
    if not day_arrays:
        raise CurveError("no data")
    lengths = [len(d) for d in day_arrays]
    days = np.concatenate(day_arrays)
    values = np.concatenate([s.values for s in series if len(s)]).astype(np.float64)
    keep = values > 0.0
    if not keep.any():
        raise CurveError("no data")
    owner = np.repeat(np.arange(len(lengths)), lengths)
    days = days[keep]
    values = values[keep]
    contributing = int(np.unique(owner[keep]).size)
    uniq, inverse = np.unique(days, return_inverse=True)
    sums = np.bincount(inverse, weights=values)
    counts = np.bincount(inverse)
    return SignatureCurve(uniq.astype(np.int64), sums / counts, contributing)


def normalize_curve(curve: SignatureCurve) -> SignatureCurve:
    """Map values onto [0, 1] by (v - min) / (max - min); display only."""
    if len(curve) < 2:
        raise CurveError("need >=2 points to normalize")
    vmin = float(curve.values.min())
    vmax = float(curve.values.max())
    if vmax == vmin:
        raise CurveError("degenerate normalization: constant curve")
    return SignatureCurve(curve.days, (curve.values - vmin) / (vmax - vmin),
                          curve.contributing_cells)


def interpolate_daily(curve: SignatureCurve) -> SignatureCurve:
    """Linear interpolation onto every integer day in [first, last];
    original sample days keep their exact values."""
    if len(curve) < 2:
        raise CurveError("need >=2 points to interpolate")
    all_days = np.arange(curve.days[0], curve.days[-1] + 1, dtype=np.int64)
    values = np.interp(all_days, curve.days, curve.values)
    return SignatureCurve(all_days, values, curve.contributing_cells)


def polyfit(curve: SignatureCurve, degree: int) -> PolyFit:
    """Least-squares fit on the time axis scaled to [-1, 1].

    Solved via SVD (numpy lstsq) rather than normal equations; exact for
    data generated from a polynomial of degree <= requested degree.
    """
    if not 1 <= degree <= 12:
        raise CurveError(f"degree {degree} outside supported range 1..12")
    n = len(curve)
    if n < degree + 1:
        raise CurveError(f"underdetermined fit: {n} points for degree {degree}")
    d0 = float(curve.days[0])
    d1 = float(curve.days[-1])
    t = (2.0 * curve.days.astype(np.float64) - (d0 + d1)) / (d1 - d0)
    vander = np.vander(t, degree + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(vander, curve.values, rcond=None)
    residuals = vander @ coeffs - curve.values
    rmse = float(np.sqrt(np.mean(residuals ** 2)))
    return PolyFit(degree, tuple(float(c) for c in coeffs), d0, d1, rmse)


def eval_poly(fit: PolyFit, day: float) -> float:
    """Evaluate the fitted polynomial at a day number (Horner form).
    Extrapolation beyond [t0, t1] is allowed; use fit.covers() to detect it."""
    t = fit.scale(day)
    acc = 0.0
    for c in reversed(fit.coeffs):
        acc = acc * t + c
    return acc
