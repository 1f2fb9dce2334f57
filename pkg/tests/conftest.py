"""Shared fixtures and the acceptance-criterion result reporter."""

from __future__ import annotations

import numpy as np
import pytest

from terratrace.geo import DEFAULT_EXTENT, GeoPolygon, default_regions
from terratrace.ingest import NdviSample
from terratrace.store import Store, build_store, date_of


def pytest_runtest_logreport(report):
    # one pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        print(f"\n[acceptance] {name}: {'PASS' if report.passed else 'FAIL'}")


def random_simple_polygon(rng: np.random.Generator, center_lat: float,
                          center_lon: float, n_vertices: int = 6,
                          max_radius_deg: float = 1.0) -> GeoPolygon:
    """Star-shaped polygon around a center, guaranteed simple.

    Angular gaps are drawn from [0.5, 1.0] and normalized to sum to 2*pi, so
    every gap stays below pi and the center lies in the polygon's kernel.
    """
    gaps = rng.uniform(0.5, 1.0, n_vertices)
    angles = rng.uniform(0.0, 2.0 * np.pi) + 2.0 * np.pi * np.cumsum(gaps) / gaps.sum()
    radii = rng.uniform(0.2, 1.0, n_vertices) * max_radius_deg
    pairs = [(center_lat + r * np.sin(a), center_lon + r * np.cos(a))
             for a, r in zip(angles, radii)]
    return GeoPolygon.from_latlon(pairs)


def winding_number_inside(lat: float, lon: float, verts: list[tuple[float, float]]) -> bool:
    """Independent winding-number containment oracle (nonzero rule).

    Points exactly on an edge are reported as inside, matching the
    boundary-inclusive production rule.
    """
    px, py = lon, lat
    wn = 0
    n = len(verts)
    for i in range(n):
        y1, x1 = verts[i]
        y2, x2 = verts[(i + 1) % n]
        side = (x2 - x1) * (py - y1) - (px - x1) * (y2 - y1)
        if side == 0 and min(x1, x2) <= px <= max(x1, x2) \
                and min(y1, y2) <= py <= max(y1, y2):
            return True
        if y1 <= py:
            if y2 > py and side > 0:
                wn += 1
        else:
            if y2 <= py and side < 0:
                wn -= 1
    return wn != 0


@pytest.fixture(scope="session")
def regions():
    return default_regions()


def make_samples(cells_days_values, regions) -> list[NdviSample]:
    """NdviSamples from (CellId, day_number, ndvi) triples."""
    return [NdviSample(cell, date_of(day), ndvi)
            for cell, day, ndvi in cells_days_values]


def build_test_store(tmp_path, samples, regions, extent=DEFAULT_EXTENT) -> Store:
    build_store(samples, tmp_path / "store", regions, extent)
    return Store.load(tmp_path / "store")
