"""Spatial reference for the dataset: region partitioning of the extent,
500 m cell geometry, point-in-polygon tests, and distance computations.

All lat/lon values are WGS84 degrees.  Local offsets use an equirectangular
approximation (meters per degree of longitude scaled by cos of the region
center latitude), which is what makes cell indexing exact and reversible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from terratrace import kernels

# Equirectangular scale: meters per degree of latitude.
METERS_PER_DEG_LAT = 111_320.0

# Mean Earth radius for great-circle distances.
EARTH_RADIUS_KM = 6371.0

# Default dataset extent: California bounding box.
DEFAULT_EXTENT = (32.5, 42.0, -124.5, -114.1)  # lat_min, lat_max, lon_min, lon_max

DEFAULT_CELL_SIZE_M = 500.0


class GeoError(ValueError):
    """Invalid geometry (bad coordinates, degenerate polygon, out of region)."""


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise GeoError(f"non-finite coordinate ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise GeoError(f"latitude {self.lat} out of range [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise GeoError(f"longitude {self.lon} out of range [-180, 180]")


def _segments_cross(a1, a2, b1, b2) -> bool:
    """True when segment a1-a2 intersects b1-b2 (shared endpoints excluded
    by the caller; touching counts as crossing)."""

    def orient(p, q, r):
        v = (q[1] - p[1]) * (r[0] - p[0]) - (q[0] - p[0]) * (r[1] - p[1])
        return (v > 0) - (v < 0)

    o1 = orient(a1, a2, b1)
    o2 = orient(a1, a2, b2)
    o3 = orient(b1, b2, a1)
    o4 = orient(b1, b2, a2)
    if o1 != o2 and o3 != o4:
        return True

    def on(p, q, r):  # r collinear with p-q and inside its bbox
        return (min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
                and min(p[1], q[1]) <= r[1] <= max(p[1], q[1]))

    if o1 == 0 and on(a1, a2, b1):
        return True
    if o2 == 0 and on(a1, a2, b2):
        return True
    if o3 == 0 and on(b1, b2, a1):
        return True
    if o4 == 0 and on(b1, b2, a2):
        return True
    return False


@dataclass(frozen=True)
class GeoPolygon:
    """Simple polygon in the lat/lon plane.  Closure is implicit: the first
    vertex must not be repeated at the end."""

    vertices: tuple[GeoPoint, ...]

    def __post_init__(self):
        verts = tuple(self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise GeoError(f"polygon needs >=3 vertices, got {len(verts)}")
        if verts[0] == verts[-1]:
            raise GeoError("polygon must not repeat the first vertex at the end")
        n = len(verts)
        for i in range(n):
            if verts[i] == verts[(i + 1) % n]:
                raise GeoError("polygon has two identical consecutive vertices")
        pts = [(v.lat, v.lon) for v in verts]
        for i in range(n):
            a1, a2 = pts[i], pts[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue  # adjacent edges share a vertex by construction
                b1, b2 = pts[j], pts[(j + 1) % n]
                if _segments_cross(a1, a2, b1, b2):
                    raise GeoError("polygon edges self-intersect")

    @classmethod
    def from_latlon(cls, pairs) -> "GeoPolygon":
        return cls(tuple(GeoPoint(float(lat), float(lon)) for lat, lon in pairs))

    def bbox(self) -> tuple[float, float, float, float]:
        lats = [v.lat for v in self.vertices]
        lons = [v.lon for v in self.vertices]
        return min(lats), max(lats), min(lons), max(lons)

    def centroid(self) -> GeoPoint:
        """Arithmetic mean of the vertices (reference point for fire queries)."""
        n = len(self.vertices)
        return GeoPoint(sum(v.lat for v in self.vertices) / n,
                        sum(v.lon for v in self.vertices) / n)

    def area_deg2(self) -> float:
        """Shoelace area in squared degrees; zero means degenerate."""
        total = 0.0
        n = len(self.vertices)
        for i in range(n):
            a = self.vertices[i]
            b = self.vertices[(i + 1) % n]
            total += a.lon * b.lat - b.lon * a.lat
        return abs(total) / 2.0

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lats = np.array([v.lat for v in self.vertices], dtype=np.float64)
        lons = np.array([v.lon for v in self.vertices], dtype=np.float64)
        return lats, lons


@dataclass(frozen=True)
class RegionSpec:
    """One of the boxes tiling the dataset extent, carrying its own 500 m grid.

    Region boxes are half-open: a region contains its south and west edges.
    The grid may overhang the north/east bounds by a partial cell row/column
    (dimensions are rounded up), so every in-bounds point maps to a cell.
    """

    region_id: int
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float
    cell_size_m: float = DEFAULT_CELL_SIZE_M
    rows: int = field(default=0)
    cols: int = field(default=0)

    def __post_init__(self):
        if self.cell_size_m <= 0:
            raise GeoError("cell_size_m must be > 0")
        if self.lat_max <= self.lat_min or self.lon_max <= self.lon_min:
            raise GeoError(f"region {self.region_id} has an empty bounding box")
        if self.rows == 0 or self.cols == 0:
            height_m = (self.lat_max - self.lat_min) * METERS_PER_DEG_LAT
            width_m = (self.lon_max - self.lon_min) * self.meters_per_deg_lon()
            object.__setattr__(self, "rows", max(1, math.ceil(height_m / self.cell_size_m)))
            object.__setattr__(self, "cols", max(1, math.ceil(width_m / self.cell_size_m)))

    @property
    def origin(self) -> GeoPoint:
        """Southwest corner of the region."""
        return GeoPoint(self.lat_min, self.lon_min)

    def center_lat(self) -> float:
        return (self.lat_min + self.lat_max) / 2.0

    def meters_per_deg_lon(self) -> float:
        return METERS_PER_DEG_LAT * math.cos(math.radians(self.center_lat()))

    def contains(self, p: GeoPoint) -> bool:
        """Half-open box test: south/west edges in, north/east edges out."""
        return (self.lat_min <= p.lat < self.lat_max
                and self.lon_min <= p.lon < self.lon_max)

    def to_dict(self) -> dict:
        return {
            "region_id": self.region_id,
            "lat_min": self.lat_min,
            "lat_max": self.lat_max,
            "lon_min": self.lon_min,
            "lon_max": self.lon_max,
            "cell_size_m": self.cell_size_m,
            "rows": self.rows,
            "cols": self.cols,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegionSpec":
        return cls(
            region_id=int(d["region_id"]),
            lat_min=float(d["lat_min"]),
            lat_max=float(d["lat_max"]),
            lon_min=float(d["lon_min"]),
            lon_max=float(d["lon_max"]),
            cell_size_m=float(d.get("cell_size_m", DEFAULT_CELL_SIZE_M)),
            rows=int(d.get("rows", 0)),
            cols=int(d.get("cols", 0)),
        )


@dataclass(frozen=True, order=True)
class CellId:
    """Grid cell address; ordering (region, row, col) is the tie-break order."""

    region_id: int
    row: int
    col: int

    def __post_init__(self):
        if self.row < 0 or self.col < 0:
            raise GeoError(f"negative cell index ({self.row}, {self.col})")


def default_regions(extent: tuple[float, float, float, float] = DEFAULT_EXTENT,
                    grid: tuple[int, int] = (4, 2),
                    cell_size_m: float = DEFAULT_CELL_SIZE_M) -> list[RegionSpec]:
    """Split the extent into an n_rows x n_cols block of equal regions,
    ids row-major from the southwest corner."""
    lat_min, lat_max, lon_min, lon_max = extent
    n_rows, n_cols = grid
    dlat = (lat_max - lat_min) / n_rows
    dlon = (lon_max - lon_min) / n_cols
    regions = []
    for r in range(n_rows):
        for c in range(n_cols):
            regions.append(RegionSpec(
                region_id=r * n_cols + c,
                lat_min=lat_min + r * dlat,
                lat_max=lat_min + (r + 1) * dlat,
                lon_min=lon_min + c * dlon,
                lon_max=lon_min + (c + 1) * dlon,
                cell_size_m=cell_size_m,
            ))
    return regions


def region_of(p: GeoPoint, regions: list[RegionSpec]) -> int | None:
    """Region id whose half-open box contains p, or None outside the extent."""
    for region in regions:
        if region.contains(p):
            return region.region_id
    return None


def cell_of(p: GeoPoint, region: RegionSpec) -> CellId:
    """Cell containing p: floor of the meter offsets from the region origin.

    Accepts any point within the region's grid extent (bounds rounded up to
    whole cells), so cell centers of edge cells always map back to their cell.
    """
    north_m = (p.lat - region.lat_min) * METERS_PER_DEG_LAT
    east_m = (p.lon - region.lon_min) * region.meters_per_deg_lon()
    row = math.floor(north_m / region.cell_size_m)
    col = math.floor(east_m / region.cell_size_m)
    if not (0 <= row < region.rows and 0 <= col < region.cols):
        raise GeoError(
            f"point ({p.lat}, {p.lon}) out of region {region.region_id}")
    return CellId(region.region_id, row, col)


def cell_center(c: CellId, region: RegionSpec) -> GeoPoint:
    """Geographic center of a cell: origin + (row+0.5, col+0.5) cells."""
    if c.region_id != region.region_id or not (0 <= c.row < region.rows and 0 <= c.col < region.cols):
        raise GeoError(f"cell {c} invalid for region {region.region_id}")
    north_m = (c.row + 0.5) * region.cell_size_m
    east_m = (c.col + 0.5) * region.cell_size_m
    return GeoPoint(region.lat_min + north_m / METERS_PER_DEG_LAT,
                    region.lon_min + east_m / region.meters_per_deg_lon())


def point_in_polygon(p: GeoPoint, poly: GeoPolygon) -> bool:
    """Even-odd (ray casting) containment; boundary points count as inside."""
    if poly.area_deg2() == 0.0:
        raise GeoError("degenerate polygon")
    vlats, vlons = poly.arrays()
    out = kernels.points_in_polygon(
        np.array([p.lat]), np.array([p.lon]), vlats, vlons)
    return bool(out[0])


def points_in_polygon(lats: np.ndarray, lons: np.ndarray, poly: GeoPolygon) -> np.ndarray:
    """Vectorized containment test for many points at once."""
    if poly.area_deg2() == 0.0:
        raise GeoError("degenerate polygon")
    vlats, vlons = poly.arrays()
    return kernels.points_in_polygon(
        np.ascontiguousarray(lats, dtype=np.float64),
        np.ascontiguousarray(lons, dtype=np.float64),
        vlats, vlons)


def euclid_dist_m(a: GeoPoint, b: GeoPoint) -> float:
    """Planar distance in meters under the equirectangular approximation
    centered at the midpoint latitude.  Adequate below ~100 km."""
    dy = (b.lat - a.lat) * METERS_PER_DEG_LAT
    mid = math.radians((a.lat + b.lat) / 2.0)
    dx = (b.lon - a.lon) * METERS_PER_DEG_LAT * math.cos(mid)
    return math.hypot(dx, dy)


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in kilometers (mean Earth radius 6371 km)."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))
