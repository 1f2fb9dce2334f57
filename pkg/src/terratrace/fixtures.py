"""Seeded synthetic observation generator for desk-scale datasets.

Profiles mimic the seasonal NDVI shapes the classifier must separate:
``annual`` rises through spring to a mid-season peak then drops through
harvest; ``evergreen`` stays high year round; ``bare`` stays near zero;
``mixed`` interleaves all three cell by cell.  Output is deterministic for
a given seed, byte for byte.
"""

from __future__ import annotations

import math
import random
from datetime import date, timedelta
from pathlib import Path

from terratrace.geo import GeoPoint, GeoPolygon, RegionSpec, cell_center, cell_of, default_regions, region_of
from terratrace.ingest import OBSERVATION_HEADER

PROFILES = ("annual", "evergreen", "bare", "mixed")

DEFAULT_ANCHOR = GeoPoint(36.0, -120.0)
DEFAULT_START = date(2020, 4, 1)
CADENCE_DAYS = 5


def annual_ndvi(doy: int) -> float:
    """Rise from a 0.25 baseline to a 0.75 peak near day 185, decline through
    harvest to the baseline by day 250."""
    if doy < 120:
        return 0.25
    if doy < 185:
        return 0.25 + 0.50 * (doy - 120) / 65.0
    if doy < 250:
        return 0.75 - 0.50 * (doy - 185) / 65.0
    return 0.25


def evergreen_ndvi(_doy: int) -> float:
    return 0.80


def bare_ndvi(_doy: int) -> float:
    return 0.05


_PROFILE_FN = {"annual": annual_ndvi, "evergreen": evergreen_ndvi, "bare": bare_ndvi}


def _cell_profile(profile: str, cell_index: int) -> str:
    if profile == "mixed":
        return ("annual", "evergreen", "bare")[cell_index % 3]
    return profile


def block_cells(n_cells: int, anchor: GeoPoint = DEFAULT_ANCHOR,
                regions: list[RegionSpec] | None = None) -> list[GeoPoint]:
    """Centers of a square block of n_cells grid cells anchored at a point."""
    regions = regions or default_regions()
    rid = region_of(anchor, regions)
    if rid is None:
        raise ValueError(f"anchor {anchor} outside the extent")
    region = next(r for r in regions if r.region_id == rid)
    base = cell_of(anchor, region)
    side = math.ceil(math.sqrt(n_cells))
    centers = []
    for i in range(n_cells):
        row = base.row + i // side
        col = base.col + i % side
        centers.append(cell_center(type(base)(rid, row, col), region))
    return centers


def block_polygon(n_cells: int, anchor: GeoPoint = DEFAULT_ANCHOR,
                  regions: list[RegionSpec] | None = None,
                  pad_deg: float = 0.01) -> GeoPolygon:
    """Axis-aligned rectangle enclosing the generated block, padded a little
    so every cell center is strictly inside."""
    centers = block_cells(n_cells, anchor, regions)
    lat_min = min(c.lat for c in centers) - pad_deg
    lat_max = max(c.lat for c in centers) + pad_deg
    lon_min = min(c.lon for c in centers) - pad_deg
    lon_max = max(c.lon for c in centers) + pad_deg
    return GeoPolygon.from_latlon([
        (lat_min, lon_min), (lat_min, lon_max),
        (lat_max, lon_max), (lat_max, lon_min)])


def generate_rows(profile: str, n_cells: int, n_days: int, seed: int,
                  anchor: GeoPoint = DEFAULT_ANCHOR,
                  start: date = DEFAULT_START,
                  regions: list[RegionSpec] | None = None) -> list[str]:
    """Observation CSV rows (no header), one per cell per sample date."""
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}, expected one of {PROFILES}")
    rng = random.Random(seed)
    centers = block_cells(n_cells, anchor, regions)
    dates = [start + timedelta(days=k)
             for k in range(0, n_days + 1, CADENCE_DAYS)]
    rows = []
    for idx, center in enumerate(centers):
        fn = _PROFILE_FN[_cell_profile(profile, idx)]
        for when in dates:
            doy = when.timetuple().tm_yday
            ndvi = fn(doy) + rng.uniform(-0.01, 0.01)
            ndvi = max(-0.999, min(0.999, ndvi))
            # invert NDVI to a reflectance pair with nir + red = 0.5
            nir = 0.25 * (1.0 + ndvi)
            red = 0.25 * (1.0 - ndvi)
            cloudy = rng.random() < 0.08
            cloud = (0.12 + rng.random() * 0.5) if cloudy else rng.random() * 0.09
            rows.append(f"{center.lat:.6f},{center.lon:.6f},{when.isoformat()},"
                        f"{red:.6f},{nir:.6f},{cloud:.6f}")
    return rows


def write_fixture_csv(path: str | Path, profile: str, n_cells: int,
                      n_days: int, seed: int,
                      anchor: GeoPoint = DEFAULT_ANCHOR,
                      start: date = DEFAULT_START) -> int:
    """Write the fixture CSV; returns the number of data rows."""
    rows = generate_rows(profile, n_cells, n_days, seed, anchor, start)
    text = ",".join(OBSERVATION_HEADER) + "\n" + "\n".join(rows) + "\n"
    Path(path).write_text(text)
    return len(rows)
