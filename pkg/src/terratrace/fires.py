"""Fire-event records (MODIS-style point detections) and distance queries."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date

from terratrace.geo import GeoError, GeoPoint, GeoPolygon, haversine_km
from terratrace.ingest import RowError

FIRE_HEADER = ["lat", "lon", "date", "confidence"]

DEFAULT_RADIUS_KM = 50.0


class FireCsvError(ValueError):
    """Bad header or undecodable fire CSV."""


@dataclass(frozen=True)
class FireEvent:
    point: GeoPoint
    date: date
    confidence: float


@dataclass
class FireParseResult:
    events: list[FireEvent]
    errors: list[RowError]


def load_fires(source) -> FireParseResult:
    """Parse the fire CSV (header ``lat,lon,date,confidence``); bad rows are
    reported with line numbers rather than aborting the load."""
    if isinstance(source, (bytes, bytearray)):
        text = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        text = io.StringIO(source)
    elif isinstance(source, io.TextIOBase):
        text = source
    else:
        text = io.TextIOWrapper(source, encoding="utf-8")
    reader = csv.reader(text)
    try:
        header = next(reader)
    except StopIteration:
        return FireParseResult([], [])
    if [h.strip() for h in header] != FIRE_HEADER:
        raise FireCsvError(f"bad header: expected {','.join(FIRE_HEADER)}")
    events: list[FireEvent] = []
    errors: list[RowError] = []
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 4:
            errors.append(RowError(line, f"expected 4 fields, got {len(row)}"))
            continue
        try:
            point = GeoPoint(float(row[0]), float(row[1]))
            when = date.fromisoformat(row[2].strip())
            confidence = float(row[3])
            if not 0.0 <= confidence <= 1.0:
                raise ValueError(f"confidence out of range [0,1]: {confidence}")
        except (ValueError, GeoError) as exc:
            errors.append(RowError(line, str(exc)))
            continue
        events.append(FireEvent(point, when, confidence))
    return FireParseResult(events, errors)


def nearest_fire(p: GeoPoint,
                 events: list[FireEvent]) -> tuple[FireEvent, float] | None:
    """Event minimizing great-circle distance to p; ties break to the earlier
    date, then input order.  None when no events."""
    best: tuple[float, date, int] | None = None
    winner: FireEvent | None = None
    for i, e in enumerate(events):
        key = (haversine_km(p, e.point), e.date, i)
        if best is None or key < best:
            best = key
            winner = e
    if winner is None:
        return None
    return winner, best[0]


def fire_history(poly: GeoPolygon, events: list[FireEvent],
                 radius_km: float = DEFAULT_RADIUS_KM,
                 date_range: tuple[date | None, date | None] = (None, None),
                 reference: str = "centroid",
                 ) -> list[tuple[FireEvent, float]]:
    """Events within radius_km of the polygon and inside the date window,
    sorted by distance then date.

    Distance is measured from the vertex centroid by default; with
    ``reference="vertices"`` it is the nearest distance from any vertex.
    """
    if radius_km <= 0:
        raise ValueError(f"radius_km must be > 0, got {radius_km}")
    if reference not in ("centroid", "vertices"):
        raise ValueError(f"reference must be centroid|vertices, got {reference!r}")
    if poly.area_deg2() == 0.0:
        raise GeoError("degenerate polygon")
    first, last = date_range
    centroid = poly.centroid()
    hits = []
    for e in events:
        if first is not None and e.date < first:
            continue
        if last is not None and e.date > last:
            continue
        if reference == "centroid":
            dist = haversine_km(centroid, e.point)
        else:
            dist = min(haversine_km(v, e.point) for v in poly.vertices)
        if dist <= radius_km:
            hits.append((e, dist))
    hits.sort(key=lambda pair: (pair[1], pair[0].date))
    return hits


def fire_history_to_dicts(hits: list[tuple[FireEvent, float]]) -> list[dict]:
    return [
        {
            "lat": e.point.lat,
            "lon": e.point.lon,
            "date": e.date.isoformat(),
            "confidence": e.confidence,
            "distance_km": dist,
        }
        for e, dist in hits
    ]
