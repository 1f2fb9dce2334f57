"""Fire history tests: CSV loading, nearest fire, distance/date filters."""

from datetime import date

import numpy as np
import pytest

from terratrace.fires import (
    FireCsvError,
    FireEvent,
    fire_history,
    fire_history_to_dicts,
    load_fires,
    nearest_fire,
)
from terratrace.geo import GeoError, GeoPoint, GeoPolygon, haversine_km

HEADER = "lat,lon,date,confidence\n"


def event(lat, lon, when=date(2021, 7, 1), confidence=0.9):
    return FireEvent(GeoPoint(lat, lon), when, confidence)


SQUARE = GeoPolygon.from_latlon([(36, -120), (36, -119), (37, -119), (37, -120)])


class TestLoadFires:
    def test_valid_row(self):
        result = load_fires(HEADER + "36.5,-119.5,2021-07-01,0.85\n")
        assert len(result.events) == 1
        e = result.events[0]
        assert e.point == GeoPoint(36.5, -119.5)
        assert e.confidence == 0.85

    def test_confidence_out_of_range(self):
        result = load_fires(HEADER + "36.5,-119.5,2021-07-01,2.0\n")
        assert not result.events
        assert len(result.errors) == 1
        assert result.errors[0].line == 2

    def test_empty_file(self):
        result = load_fires("")
        assert result.events == [] and result.errors == []

    def test_bad_header(self):
        with pytest.raises(FireCsvError, match="bad header"):
            load_fires("lat,lon,when,confidence\n")


class TestNearestFire:
    def test_event_at_point(self):
        p = GeoPoint(36.5, -119.5)
        hit = nearest_fire(p, [event(40, -115), event(36.5, -119.5)])
        assert hit is not None
        e, dist = hit
        assert e.point == p
        assert dist == 0.0

    def test_empty_events(self):
        assert nearest_fire(GeoPoint(36, -120), []) is None

    def test_tie_broken_by_earlier_date_then_order(self):
        p = GeoPoint(36.0, -120.0)
        later = event(36.0, -120.0, date(2021, 8, 1))
        earlier = event(36.0, -120.0, date(2021, 7, 1))
        assert nearest_fire(p, [later, earlier])[0] is earlier
        twin_a = event(36.0, -120.0, date(2021, 7, 1), 0.5)
        twin_b = event(36.0, -120.0, date(2021, 7, 1), 0.6)
        assert nearest_fire(p, [twin_a, twin_b])[0] is twin_a

    def test_matches_exhaustive_scan(self):
        rng = np.random.default_rng(61)
        events = [event(float(rng.uniform(32, 42)), float(rng.uniform(-124, -114)),
                        date(2021, 1, 1))
                  for _ in range(50)]
        for _ in range(50):
            p = GeoPoint(float(rng.uniform(32, 42)), float(rng.uniform(-124, -114)))
            expected = min(range(len(events)),
                           key=lambda i: (haversine_km(p, events[i].point),
                                          events[i].date, i))
            assert nearest_fire(p, events)[0] is events[expected]


class TestFireHistory:
    def test_event_inside_polygon_included(self):
        hits = fire_history(SQUARE, [event(36.5, -119.5)], radius_km=50)
        assert len(hits) == 1
        assert hits[0][1] < 50

    def test_far_event_excluded(self):
        # ~500 km north of the centroid
        hits = fire_history(SQUARE, [event(41.0, -119.5)], radius_km=50)
        assert hits == []

    def test_reference_is_vertex_centroid(self):
        centroid = SQUARE.centroid()
        e = event(36.6, -119.4)
        hits = fire_history(SQUARE, [e], radius_km=1000)
        assert hits[0][1] == pytest.approx(haversine_km(centroid, e.point))

    def test_matches_bruteforce_double_filter(self):
        rng = np.random.default_rng(71)
        events = [event(float(rng.uniform(34, 39)), float(rng.uniform(-122, -117)),
                        date(2021, 1, 1) .replace(month=int(rng.integers(1, 13))))
                  for _ in range(200)]
        centroid = SQUARE.centroid()
        first, last = date(2021, 3, 1), date(2021, 9, 30)
        radius = 120.0
        hits = fire_history(SQUARE, events, radius, (first, last))
        expected = [(e, haversine_km(centroid, e.point)) for e in events
                    if first <= e.date <= last
                    and haversine_km(centroid, e.point) <= radius]
        expected.sort(key=lambda pair: (pair[1], pair[0].date))
        assert [e for e, _ in hits] == [e for e, _ in expected]
        assert all(d == pytest.approx(ed) for (_, d), (_, ed) in zip(hits, expected))

    def test_subset_and_sorted(self):
        rng = np.random.default_rng(73)
        events = [event(float(rng.uniform(35, 38)), float(rng.uniform(-121, -118)))
                  for _ in range(100)]
        hits = fire_history(SQUARE, events, radius_km=80)
        assert all(e in events for e, _ in hits)
        dists = [d for _, d in hits]
        assert dists == sorted(dists)
        assert all(d >= 0 for d in dists)

    def test_vertex_reference_alternative(self):
        # event right next to a corner: near by vertex distance, farther
        # than the radius when measured from the centroid
        e = event(36.001, -119.999)
        assert fire_history(SQUARE, [e], radius_km=10) == []
        hits = fire_history(SQUARE, [e], radius_km=10, reference="vertices")
        assert len(hits) == 1
        assert hits[0][1] == pytest.approx(
            min(haversine_km(v, e.point) for v in SQUARE.vertices))

    def test_unknown_reference_rejected(self):
        with pytest.raises(ValueError, match="reference"):
            fire_history(SQUARE, [], reference="edges")

    def test_bad_radius_rejected(self):
        with pytest.raises(ValueError):
            fire_history(SQUARE, [], radius_km=0)

    def test_degenerate_polygon_rejected(self):
        line = GeoPolygon.from_latlon([(36, -120), (36.5, -119.5), (37, -119)])
        with pytest.raises(GeoError, match="degenerate"):
            fire_history(line, [], radius_km=10)

    def test_dict_serialization(self):
        hits = fire_history(SQUARE, [event(36.5, -119.5)], radius_km=50)
        rows = fire_history_to_dicts(hits)
        assert rows[0]["lat"] == 36.5
        assert rows[0]["date"] == "2021-07-01"
        assert "distance_km" in rows[0]
