"""Phenology feature extraction and rule-based land-use classification.

Features and thresholds operate on the raw (un-normalized) mean curve.
All thresholds live in ClassifierParams so deployments can audit and
adjust them; the defaults are the published rule set.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from terratrace.curves import SignatureCurve


class ClassifierConfigError(ValueError):
    """Thresholds out of order or otherwise unusable."""


class InsufficientDataError(ValueError):
    """Curve has too few points for feature extraction."""


class LandUseClass(str, enum.Enum):
    INSUFFICIENT_DATA = "InsufficientData"
    NON_VEGETATIVE = "NonVegetative"
    SPARSE_VEGETATION = "SparseVegetation"
    ANNUAL_CROP = "AnnualCrop"
    PERENNIAL_VEGETATION = "PerennialVegetation"


class VegetationPresence(str, enum.Enum):
    NON_VEGETATIVE = "NonVegetative"
    SOME_VEGETATION = "SomeVegetation"
    HEALTHY_VEGETATION = "HealthyVegetation"


@dataclass(frozen=True)
class ClassifierParams:
    veg_threshold: float = 0.2
    peak_lo: float = 0.2
    peak_hi: float = 0.8
    rate_threshold: float = 0.005
    min_points: int = 10  # strictly more than this many points required
    decline_margin: float = 0.05

    def __post_init__(self):
        if self.peak_lo > self.peak_hi:
            raise ClassifierConfigError(
                f"peak_lo {self.peak_lo} > peak_hi {self.peak_hi}")
        if self.rate_threshold <= 0 or self.decline_margin < 0:
            raise ClassifierConfigError("rates and margins must be positive")
        if self.min_points < 0:
            raise ClassifierConfigError("min_points must be >= 0")

    def to_dict(self) -> dict:
        return {
            "veg_threshold": self.veg_threshold,
            "peak_lo": self.peak_lo,
            "peak_hi": self.peak_hi,
            "rate_threshold": self.rate_threshold,
            "min_points": self.min_points,
            "decline_margin": self.decline_margin,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierParams":
        known = {f: d[f] for f in
                 ("veg_threshold", "peak_lo", "peak_hi", "rate_threshold",
                  "min_points", "decline_margin") if f in d}
        if "min_points" in known:
            known["min_points"] = int(known["min_points"])
        return cls(**known)


@dataclass(frozen=True)
class CurveFeatures:
    """Summary statistics of a signature curve.

    growth_rate is the largest consecutive-sample increase, decline_rate the
    smallest (most negative) consecutive-sample difference; a single
    inter-observation drop is what captures a harvest dry-down.
    """

    n_points: int
    min: float
    max: float
    range: float
    median: float
    growth_rate: float
    decline_rate: float
    peak_day: int

    def to_dict(self) -> dict:
        return {
            "n_points": self.n_points,
            "min": self.min,
            "max": self.max,
            "range": self.range,
            "median": self.median,
            "growth_rate": self.growth_rate,
            "decline_rate": self.decline_rate,
            "peak_day": self.peak_day,
        }


def validate_curve(curve: SignatureCurve,
                   params: ClassifierParams = ClassifierParams()) -> bool:
    """True iff the curve has strictly more than min_points points."""
    return len(curve) > params.min_points


def extract_features(curve: SignatureCurve,
                     params: ClassifierParams = ClassifierParams()) -> CurveFeatures:
    """Min/max/range/median plus consecutive growth and decline extremes.

    Median of an even count is the mean of the two central values.
    """
    if not validate_curve(curve, params):
        raise InsufficientDataError(
            f"insufficient data: {len(curve)} points (> {params.min_points} required)")
    values = curve.values
    diffs = np.diff(values)
    vmax = float(values.max())
    return CurveFeatures(
        n_points=len(curve),
        min=float(values.min()),
        max=vmax,
        range=float(values.max() - values.min()),
        median=float(np.median(values)),
        growth_rate=float(diffs.max()),
        decline_rate=float(diffs.min()),
        peak_day=int(curve.days[int(np.argmax(values))]),
    )


def vegetation_presence(mean_ndvi: float) -> VegetationPresence:
    """Presence label from mean NDVI: <0.1 none, [0.1, 0.2) some, >=0.2 healthy."""
    if mean_ndvi < 0.1:
        return VegetationPresence.NON_VEGETATIVE
    if mean_ndvi < 0.2:
        return VegetationPresence.SOME_VEGETATION
    return VegetationPresence.HEALTHY_VEGETATION


def _annual_crop_checks(features: CurveFeatures, curve: SignatureCurve,
                        params: ClassifierParams) -> dict[str, bool]:
    """The four annual-crop conditions, evaluated independently."""
    values = curve.values
    peak_idx = int(np.argmax(values))
    after = values[peak_idx + 1:]
    return {
        "rises_above_threshold": features.max > params.veg_threshold,
        "peak_in_bounds": params.peak_lo <= features.max <= params.peak_hi,
        "declines_after_peak": bool(after.size
                                    and (after < features.max - params.decline_margin).any()),
        "rates_above_threshold": (features.growth_rate > params.rate_threshold
                                  and features.decline_rate < -params.rate_threshold),
    }


def classify(features: CurveFeatures | None, curve: SignatureCurve,
             params: ClassifierParams = ClassifierParams()) -> LandUseClass:
    """Decision ladder, first match wins:

    1. too few points -> InsufficientData
    2. median < 0.1   -> NonVegetative
    3. median < 0.2   -> SparseVegetation
    4. annual-crop checks all pass -> AnnualCrop
    5. otherwise      -> PerennialVegetation
    """
    if not validate_curve(curve, params):
        return LandUseClass.INSUFFICIENT_DATA
    if features is None:
        features = extract_features(curve, params)
    if features.median < 0.1:
        return LandUseClass.NON_VEGETATIVE
    if features.median < 0.2:
        return LandUseClass.SPARSE_VEGETATION
    if all(_annual_crop_checks(features, curve, params).values()):
        return LandUseClass.ANNUAL_CROP
    return LandUseClass.PERENNIAL_VEGETATION


def classification_warnings(features: CurveFeatures | None, curve: SignatureCurve,
                            params: ClassifierParams = ClassifierParams()) -> list[str]:
    """Audit notes accompanying a classification.

    Flags curves that satisfy every annual-crop condition except the peak
    upper bound (observed on real crops whose peak exceeds the configured
    bound, e.g. corn near harvest).
    """
    if not validate_curve(curve, params) or features is None:
        return []
    if features.median < 0.2:
        return []
    checks = _annual_crop_checks(features, curve, params)
    if not checks["peak_in_bounds"] and features.max > params.peak_hi \
            and all(v for k, v in checks.items() if k != "peak_in_bounds"):
        return [f"AnnualCrop (peak above configured bound): max {features.max:.4f} "
                f"exceeds peak_hi {params.peak_hi}"]
    return []
