"""Feature extraction and land-use classification rule tests."""

import numpy as np
import pytest

from terratrace.classify import (
    ClassifierConfigError,
    ClassifierParams,
    InsufficientDataError,
    LandUseClass,
    VegetationPresence,
    classification_warnings,
    classify,
    extract_features,
    validate_curve,
    vegetation_presence,
)
from terratrace.curves import SignatureCurve


def curve_of(values, start_day=100, step=5):
    days = [start_day + i * step for i in range(len(values))]
    return SignatureCurve.from_points(list(zip(days, values)))


def annual_values():
    """Dense rise 0.15 -> 0.75 peaking mid-series, decline to 0.2."""
    rise = list(np.linspace(0.15, 0.75, 15))
    fall = list(np.linspace(0.75, 0.20, 12))[1:]
    return rise + fall


# values realizing the published corn statistics: max 0.97, median 0.8722,
# and a single harvest drop of exactly -0.7729
CORN_VALUES = [0.30, 0.45, 0.60, 0.72, 0.80, 0.8722, 0.89, 0.91, 0.93,
               0.95, 0.96, 0.97, 0.97 - 0.7729]


class TestValidateCurve:
    def test_eleven_points_valid(self):
        assert validate_curve(curve_of([0.5] * 11))

    def test_ten_points_invalid(self):
        assert not validate_curve(curve_of([0.5] * 10))

    def test_empty_invalid(self):
        assert not validate_curve(SignatureCurve(np.empty(0, dtype=np.int64),
                                                 np.empty(0), 0))


class TestExtractFeatures:
    def test_odd_count_median_and_range(self):
        # 0.2/0.4/0.6 plateau-padded to 13 points
        values = [0.2, 0.2, 0.2, 0.2, 0.2, 0.4, 0.4, 0.4, 0.6, 0.6, 0.6, 0.6, 0.6]
        f = extract_features(curve_of(values))
        assert f.median == pytest.approx(0.4)
        assert f.range == pytest.approx(0.4)
        assert f.min == pytest.approx(0.2)
        assert f.max == pytest.approx(0.6)

    def test_even_count_median_is_mean_of_middle(self):
        values = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 0.15, 0.25]
        f = extract_features(curve_of(values))
        assert f.median == pytest.approx(np.median(values))

    def test_growth_candidate_from_consecutive_pair(self):
        values = [0.2, 0.3] + [0.3] * 10
        f = extract_features(curve_of(values))
        assert f.growth_rate == pytest.approx(0.1)

    def test_corn_statistics_exact(self):
        f = extract_features(curve_of(CORN_VALUES))
        assert abs(f.max - 0.97) < 1e-9
        assert abs(f.median - 0.8722) < 1e-9
        assert abs(f.decline_rate - (-0.7729)) < 1e-9

    def test_peak_day(self):
        values = [0.1, 0.2, 0.9, 0.3] + [0.3] * 8
        c = curve_of(values, start_day=50, step=10)
        f = extract_features(c)
        assert f.peak_day == 70

    def test_insufficient_data_rejected(self):
        with pytest.raises(InsufficientDataError, match="insufficient data"):
            extract_features(curve_of([0.5] * 8))

    def test_feature_order_invariants(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            values = rng.uniform(-0.5, 1.0, 15)
            f = extract_features(curve_of(list(values)))
            assert f.min <= f.median <= f.max
            assert f.range == pytest.approx(f.max - f.min)


class TestVegetationPresence:
    @pytest.mark.parametrize("value,expected", [
        (0.05, VegetationPresence.NON_VEGETATIVE),
        (0.0999, VegetationPresence.NON_VEGETATIVE),
        (0.1, VegetationPresence.SOME_VEGETATION),
        (0.15, VegetationPresence.SOME_VEGETATION),
        (0.1999, VegetationPresence.SOME_VEGETATION),
        (0.2, VegetationPresence.HEALTHY_VEGETATION),
        (0.9, VegetationPresence.HEALTHY_VEGETATION),
    ])
    def test_thresholds(self, value, expected):
        assert vegetation_presence(value) == expected


class TestClassify:
    def test_annual_crop(self):
        c = curve_of(annual_values())
        f = extract_features(c)
        assert classify(f, c) == LandUseClass.ANNUAL_CROP

    def test_flat_high_is_perennial(self):
        rng = np.random.default_rng(1)
        values = 0.8 + rng.uniform(-0.002, 0.002, 30)
        c = curve_of(list(values))
        f = extract_features(c)
        assert classify(f, c) == LandUseClass.PERENNIAL_VEGETATION

    def test_flat_low_is_non_vegetative(self):
        c = curve_of([0.05] * 30)
        f = extract_features(c)
        assert classify(f, c) == LandUseClass.NON_VEGETATIVE

    def test_eight_points_insufficient(self):
        c = curve_of([0.5] * 8)
        assert classify(None, c) == LandUseClass.INSUFFICIENT_DATA

    def test_sparse_vegetation_band(self):
        c = curve_of([0.15] * 20)
        f = extract_features(c)
        assert classify(f, c) == LandUseClass.SPARSE_VEGETATION

    def test_annual_checks_individually(self):
        params = ClassifierParams()
        # fails the rate threshold: rise/fall steps of 0.05/11 < 0.005
        slow = list(np.linspace(0.25, 0.30, 12)) + list(np.linspace(0.30, 0.25, 12))[1:]
        c = curve_of(slow)
        f = extract_features(c)
        assert f.growth_rate < params.rate_threshold
        assert classify(f, c) == LandUseClass.PERENNIAL_VEGETATION

        # no decline after the peak: monotone rise
        mono = list(np.linspace(0.2, 0.75, 15))
        c2 = curve_of(mono)
        f2 = extract_features(c2)
        assert classify(f2, c2) == LandUseClass.PERENNIAL_VEGETATION

    def test_scaling_down_turns_non_vegetative(self):
        values = [v * 0.01 for v in annual_values()]
        c = curve_of(values)
        f = extract_features(c)
        assert classify(f, c) == LandUseClass.NON_VEGETATIVE

    def test_time_translation_invariance(self):
        values = annual_values()
        for shift in (0, 37, 1000):
            c = curve_of(values, start_day=100 + shift)
            f = extract_features(c)
            assert classify(f, c) == LandUseClass.ANNUAL_CROP

    def test_deterministic_and_total(self):
        rng = np.random.default_rng(15)
        for _ in range(200):
            values = list(rng.uniform(-0.2, 1.0, 20))
            c = curve_of(values)
            f = extract_features(c)
            first = classify(f, c)
            assert first == classify(f, c)
            assert isinstance(first, LandUseClass)


class TestClassifierParams:
    def test_out_of_order_peaks_rejected(self):
        with pytest.raises(ClassifierConfigError):
            ClassifierParams(peak_lo=0.9, peak_hi=0.2)

    def test_nonpositive_rate_rejected(self):
        with pytest.raises(ClassifierConfigError):
            ClassifierParams(rate_threshold=0.0)

    def test_json_round_trip(self):
        p = ClassifierParams(peak_hi=0.95, min_points=12)
        assert ClassifierParams.from_dict(p.to_dict()) == p


class TestPeakBoundWarning:
    def test_corn_curve_flagged(self):
        c = curve_of(CORN_VALUES)
        f = extract_features(c)
        warnings = classification_warnings(f, c)
        assert len(warnings) == 1
        assert "peak above configured bound" in warnings[0]
        # and the ladder itself falls through to perennial
        assert classify(f, c) == LandUseClass.PERENNIAL_VEGETATION

    def test_raised_peak_hi_restores_annual(self):
        params = ClassifierParams(peak_hi=1.0)
        c = curve_of(CORN_VALUES)
        f = extract_features(c, params)
        assert classify(f, c, params) == LandUseClass.ANNUAL_CROP
        assert classification_warnings(f, c, params) == []

    def test_in_bounds_annual_not_flagged(self):
        c = curve_of(annual_values())
        f = extract_features(c)
        assert classification_warnings(f, c) == []
