"""End-to-end polygon analysis: cells -> series -> mean curve -> fit ->
features -> classification -> fire history -> optional LLM narrative.

Shared by the CLI ``analyze`` command and the HTTP service; both emit the
same report JSON.  Reports are deterministic for a fixed store and request
(mock LLM mode), so identical requests yield byte-identical documents.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import date

import numpy as np

from terratrace.classify import (
    ClassifierParams,
    LandUseClass,
    classification_warnings,
    classify,
    extract_features,
    validate_curve,
    vegetation_presence,
)
from terratrace.curves import (
    CurveError,
    SignatureCurve,
    eval_poly,
    interpolate_daily,
    mean_curve,
    normalize_curve,
    polyfit,
)
from terratrace.fires import FireEvent, fire_history, fire_history_to_dicts
from terratrace.geo import GeoError, GeoPolygon
from terratrace.llm import LlmBackendError, build_payload, render_curve_image
from terratrace.store import Store

DEFAULT_FIT_DEGREE = 3


class NoCellsInPolygon(LookupError):
    """The polygon contains no stored cell centers."""


@dataclass
class AnalysisRequest:
    polygon: GeoPolygon
    date_range: tuple[date | None, date | None] = (None, None)
    fit_degree: int = DEFAULT_FIT_DEGREE
    params: ClassifierParams = field(default_factory=ClassifierParams)
    include_llm: bool = False
    features_from: str = "raw"  # "raw" | "interpolated"

    def __post_init__(self):
        first, last = self.date_range
        if first is not None and last is not None and first > last:
            raise ValueError("date range not ordered")
        if self.features_from not in ("raw", "interpolated"):
            raise ValueError(f"features_from must be raw|interpolated, "
                             f"got {self.features_from!r}")


@dataclass
class AnalysisOutcome:
    report: dict
    insufficient: bool = False  # curve failed the point-count validation
    llm_failed: bool = False  # backend error; report lacks llm_analysis


def _finish(report: dict) -> dict:
    digest = hashlib.sha256(
        json.dumps(report, sort_keys=True).encode("utf-8")).hexdigest()[:16]
    return {"report_id": digest, **report}


def run_analysis(store: Store, request: AnalysisRequest,
                 llm_backend=None,
                 fire_events: list[FireEvent] | None = None,
                 fire_radius_km: float = 50.0) -> AnalysisOutcome:
    """Run the full pipeline; raises NoCellsInPolygon / GeoError for requests
    the service maps to 4xx."""
    poly = request.polygon
    cells = store.cells_in_polygon(poly)
    if not cells:
        raise NoCellsInPolygon("no cells in polygon")

    params = request.params
    warnings: list[str] = []

    series = [store.load_series(c, request.date_range) for c in cells]
    try:
        curve = mean_curve(series)
    except CurveError:
        curve = SignatureCurve(np.empty(0, dtype=np.int64),
                               np.empty(0, dtype=np.float64), 0)

    base = {
        "polygon": [[v.lat, v.lon] for v in poly.vertices],
        "date_range": [d.isoformat() if d else None for d in request.date_range],
        "cells_in_polygon": len(cells),
        "params_used": params.to_dict(),
    }

    if not validate_curve(curve, params):
        report = _finish({
            **base,
            "curve": curve.to_dict() | {"normalized_points": None, "fit_points": None},
            "features": None,
            "class": LandUseClass.INSUFFICIENT_DATA.value,
            "presence": None,
            "fire_history": _fires_dict(poly, fire_events, fire_radius_km,
                                        request.date_range, store),
            "warnings": warnings + [
                f"insufficient data: {len(curve)} curve points "
                f"(> {params.min_points} required)"],
        })
        return AnalysisOutcome(report, insufficient=True)

    daily = interpolate_daily(curve)
    fit = None
    fit_points = None
    try:
        fit = polyfit(daily, request.fit_degree)
        fit_points = [[int(d), eval_poly(fit, int(d))] for d in daily.days]
    except CurveError as exc:
        warnings.append(f"fit skipped: {exc}")

    try:
        normalized = normalize_curve(curve)
        normalized_points = [[int(d), float(v)]
                             for d, v in zip(normalized.days, normalized.values)]
    except CurveError as exc:
        normalized_points = None
        warnings.append(f"normalization skipped: {exc}")

    features_curve = daily if request.features_from == "interpolated" else curve
    features = extract_features(features_curve, params)
    label = classify(features, features_curve, params)
    warnings.extend(classification_warnings(features, features_curve, params))
    mean_ndvi = float(curve.values.mean())
    presence = vegetation_presence(mean_ndvi)

    curve_dict = curve.with_fit(fit).to_dict() if fit else curve.to_dict()
    curve_dict["normalized_points"] = normalized_points
    curve_dict["fit_points"] = fit_points

    report_body = {
        **base,
        "curve": curve_dict,
        "features": features.to_dict() | {"mean": mean_ndvi},
        "class": label.value,
        "presence": presence.value,
        "fire_history": _fires_dict(poly, fire_events, fire_radius_km,
                                    request.date_range, store),
    }

    llm_failed = False
    if request.include_llm and llm_backend is not None:
        try:
            image = render_curve_image(curve)
            payload = build_payload(features, presence, image, poly, mean_ndvi)
            report_body["llm_analysis"] = llm_backend.analyze(payload, rule_class=label)
        except LlmBackendError as exc:
            llm_failed = True
            warnings.append(f"llm analysis unavailable: {exc}")

    report_body["warnings"] = warnings
    return AnalysisOutcome(_finish(report_body), llm_failed=llm_failed)


def _fires_dict(poly: GeoPolygon, events: list[FireEvent] | None,
                radius_km: float, date_range, store: Store) -> list[dict]:
    if not events:
        return []
    first, last = date_range
    if first is None and last is None and store.manifest.date_range:
        first, last = store.manifest.date_range
    try:
        hits = fire_history(poly, events, radius_km, (first, last))
    except GeoError:
        return []
    return fire_history_to_dicts(hits)


def report_to_json(report: dict) -> str:
    return json.dumps(report)
