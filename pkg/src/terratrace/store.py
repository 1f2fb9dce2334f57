"""Persistent per-cell NDVI time series, tiled by region.

Tile format (little-endian throughout), one ``region_<id>.ttrc`` file per
non-empty region:

    header:  magic "TTRC" | version u16 | region_id u16 | rows u32 | cols u32
             | cell_count u32
    cell:    row u32 | col u32 | sample_count u32
             | sample_count * (day u16 | ndvi f32)

Days are offsets from the dataset epoch 2020-01-01.  NDVI is stored as a
32-bit float; same-(cell, date) input samples are averaged at build time.
After a build the store is immutable: all queries are read-only.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from terratrace import kernels
from terratrace.geo import (
    CellId,
    GeoError,
    GeoPoint,
    GeoPolygon,
    RegionSpec,
    cell_center,
    points_in_polygon,
)
from terratrace.ingest import NdviSample

MAGIC = b"TTRC"
FORMAT_VERSION = 1
EPOCH = date(2020, 1, 1)

_HEADER = struct.Struct("<4sHHIII")
_CELL = struct.Struct("<III")
_SAMPLE = struct.Struct("<Hf")


class StoreError(RuntimeError):
    """Store build or load failure (bad directory, corrupt tile, empty store)."""


def day_number(d: date) -> int:
    return (d - EPOCH).days


def date_of(day: int) -> date:
    return EPOCH + timedelta(days=int(day))


@dataclass
class CellSeries:
    """Time-ordered NDVI samples for one cell; days strictly increasing."""

    cell: CellId
    days: np.ndarray  # int day numbers since EPOCH, sorted, unique
    values: np.ndarray  # float32 NDVI

    def __len__(self) -> int:
        return len(self.days)

    @property
    def samples(self) -> list[tuple[date, float]]:
        return [(date_of(d), float(v)) for d, v in zip(self.days, self.values)]


@dataclass
class DatasetManifest:
    extent: tuple[float, float, float, float]  # lat_min, lat_max, lon_min, lon_max
    regions: list[RegionSpec]
    date_range: tuple[date, date] | None
    version: int = FORMAT_VERSION
    counts: dict[int, dict[str, int]] = field(default_factory=dict)

    @property
    def total_cells(self) -> int:
        return sum(c["cells"] for c in self.counts.values())

    @property
    def total_samples(self) -> int:
        return sum(c["samples"] for c in self.counts.values())

    def to_dict(self) -> dict:
        lat_min, lat_max, lon_min, lon_max = self.extent
        return {
            "version": self.version,
            "epoch": EPOCH.isoformat(),
            "extent": {"lat_min": lat_min, "lat_max": lat_max,
                       "lon_min": lon_min, "lon_max": lon_max},
            "regions": [r.to_dict() for r in self.regions],
            "date_range": ([self.date_range[0].isoformat(), self.date_range[1].isoformat()]
                           if self.date_range else None),
            "counts": {str(rid): dict(c) for rid, c in sorted(self.counts.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetManifest":
        if int(d["version"]) != FORMAT_VERSION:
            raise StoreError(f"unsupported manifest version {d['version']}")
        ext = d["extent"]
        rng = d.get("date_range")
        return cls(
            extent=(float(ext["lat_min"]), float(ext["lat_max"]),
                    float(ext["lon_min"]), float(ext["lon_max"])),
            regions=[RegionSpec.from_dict(r) for r in d["regions"]],
            date_range=(date.fromisoformat(rng[0]), date.fromisoformat(rng[1])) if rng else None,
            version=int(d["version"]),
            counts={int(rid): {"cells": int(c["cells"]), "samples": int(c["samples"])}
                    for rid, c in d.get("counts", {}).items()},
        )

    def save(self, path: Path) -> None:
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: Path) -> "DatasetManifest":
        return cls.from_dict(json.loads(path.read_text()))


def _tile_path(out_dir: Path, region_id: int) -> Path:
    return out_dir / f"region_{region_id}.ttrc"


def build_store(samples: list[NdviSample], out_dir: str | Path,
                regions: list[RegionSpec],
                extent: tuple[float, float, float, float],
                force: bool = False) -> DatasetManifest:
    """Average same-(cell, date) samples, write regional tiles + manifest.

    Refuses to write into a directory that already holds a store unless
    ``force`` is set.  The tile bytes are a deterministic function of the
    input sample multiset.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    existing = list(out.glob("*.ttrc")) + ([out / "manifest.json"] if (out / "manifest.json").exists() else [])
    if existing and not force:
        raise StoreError(f"directory {out} already contains a store (use force)")
    for old in out.glob("*.ttrc"):
        old.unlink()

    by_region_spec = {r.region_id: r for r in regions}

    # (cell, day) -> [sum, count]; means computed in float64, stored as float32
    acc: dict[tuple[CellId, int], list] = {}
    for s in samples:
        day = day_number(s.date)
        if not 0 <= day <= 0xFFFF:
            raise StoreError(f"date {s.date} outside the storable range "
                             f"({EPOCH} .. {date_of(0xFFFF)})")
        if not -1.0 <= s.ndvi <= 1.0:
            raise StoreError(f"ndvi {s.ndvi} out of [-1, 1]")
        slot = acc.get((s.cell, day))
        if slot is None:
            acc[(s.cell, day)] = [s.ndvi, 1]
        else:
            slot[0] += s.ndvi
            slot[1] += 1

    per_region: dict[int, dict[CellId, list[tuple[int, float]]]] = {}
    day_min, day_max = None, None
    for (cell, day), (total, count) in acc.items():
        mean32 = float(np.float32(total / count))
        per_region.setdefault(cell.region_id, {}).setdefault(cell, []).append((day, mean32))
        day_min = day if day_min is None else min(day_min, day)
        day_max = day if day_max is None else max(day_max, day)

    counts: dict[int, dict[str, int]] = {}
    for rid in sorted(per_region):
        region = by_region_spec.get(rid)
        if region is None:
            raise StoreError(f"sample references unknown region {rid}")
        cells = per_region[rid]
        n_samples = 0
        with open(_tile_path(out, rid), "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, rid,
                                  region.rows, region.cols, len(cells)))
            for cell in sorted(cells):
                rows = sorted(cells[cell])
                fh.write(_CELL.pack(cell.row, cell.col, len(rows)))
                for day, ndvi in rows:
                    fh.write(_SAMPLE.pack(day, ndvi))
                n_samples += len(rows)
        counts[rid] = {"cells": len(cells), "samples": n_samples}

    manifest = DatasetManifest(
        extent=extent,
        regions=list(regions),
        date_range=(date_of(day_min), date_of(day_max)) if day_min is not None else None,
        counts=counts,
    )
    manifest.save(out / "manifest.json")
    return manifest


@dataclass
class _RegionIndex:
    region: RegionSpec
    rows: np.ndarray  # int32 per cell
    cols: np.ndarray
    center_lats: np.ndarray  # float64 per cell
    center_lons: np.ndarray
    offsets: np.ndarray  # int64, len cells+1, into days/values
    days: np.ndarray  # int32 flat
    values: np.ndarray  # float32 flat
    by_rowcol: dict[tuple[int, int], int]


class Store:
    """Read-only view over a built store directory."""

    def __init__(self, manifest: DatasetManifest, indexes: dict[int, _RegionIndex]):
        self.manifest = manifest
        self._indexes = indexes

    @classmethod
    def load(cls, store_dir: str | Path) -> "Store":
        root = Path(store_dir)
        manifest_path = root / "manifest.json"
        if not manifest_path.exists():
            raise StoreError(f"no manifest.json in {root}")
        manifest = DatasetManifest.load(manifest_path)
        by_id = {r.region_id: r for r in manifest.regions}
        indexes: dict[int, _RegionIndex] = {}
        for rid in sorted(manifest.counts):
            indexes[rid] = cls._load_tile(_tile_path(root, rid), by_id[rid],
                                          manifest.counts[rid])
        return cls(manifest, indexes)

    @staticmethod
    def _load_tile(path: Path, region: RegionSpec, counts: dict[str, int]) -> _RegionIndex:
        blob = path.read_bytes()
        magic, version, rid, rows, cols, cell_count = _HEADER.unpack_from(blob, 0)
        if magic != MAGIC:
            raise StoreError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise StoreError(f"{path}: unsupported tile version {version}")
        if rid != region.region_id or rows != region.rows or cols != region.cols:
            raise StoreError(f"{path}: tile header disagrees with manifest region")
        if cell_count != counts["cells"]:
            raise StoreError(f"{path}: cell count mismatch with manifest")

        cell_rows = np.empty(cell_count, dtype=np.int32)
        cell_cols = np.empty(cell_count, dtype=np.int32)
        offsets = np.zeros(cell_count + 1, dtype=np.int64)
        total = counts["samples"]
        days = np.empty(total, dtype=np.int32)
        values = np.empty(total, dtype=np.float32)

        pos = _HEADER.size
        write = 0
        for i in range(cell_count):
            row, col, n = _CELL.unpack_from(blob, pos)
            pos += _CELL.size
            cell_rows[i] = row
            cell_cols[i] = col
            raw = np.frombuffer(blob, dtype=np.dtype([("day", "<u2"), ("ndvi", "<f4")]),
                                count=n, offset=pos)
            days[write:write + n] = raw["day"]
            values[write:write + n] = raw["ndvi"]
            write += n
            pos += n * _SAMPLE.size
            offsets[i + 1] = write
        if write != total:
            raise StoreError(f"{path}: sample count mismatch with manifest")

        lat0 = region.lat_min
        lon0 = region.lon_min
        m_lon = region.meters_per_deg_lon()
        from terratrace.geo import METERS_PER_DEG_LAT as M_LAT

        center_lats = lat0 + (cell_rows + 0.5) * region.cell_size_m / M_LAT
        center_lons = lon0 + (cell_cols + 0.5) * region.cell_size_m / m_lon
        by_rowcol = {(int(r), int(c)): i
                     for i, (r, c) in enumerate(zip(cell_rows, cell_cols))}
        return _RegionIndex(region, cell_rows, cell_cols,
                            center_lats.astype(np.float64),
                            center_lons.astype(np.float64),
                            offsets, days, values, by_rowcol)

    # -- queries -----------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self._indexes

    def all_cells(self) -> list[CellId]:
        out = []
        for rid in sorted(self._indexes):
            idx = self._indexes[rid]
            out.extend(CellId(rid, int(r), int(c))
                       for r, c in zip(idx.rows, idx.cols))
        return out

    def cell_center(self, cell: CellId) -> GeoPoint:
        region = next(r for r in self.manifest.regions if r.region_id == cell.region_id)
        return cell_center(cell, region)

    def has_cell(self, cell: CellId) -> bool:
        idx = self._indexes.get(cell.region_id)
        return idx is not None and (cell.row, cell.col) in idx.by_rowcol

    def query_bbox(self, bbox: tuple[float, float, float, float]) -> list[CellId]:
        """Cells whose centers lie inside the closed box
        (lat_min, lat_max, lon_min, lon_max)."""
        lat_min, lat_max, lon_min, lon_max = bbox
        if lat_min > lat_max or lon_min > lon_max:
            raise ValueError("bbox not normalized (min > max)")
        out: list[CellId] = []
        for rid in sorted(self._indexes):
            idx = self._indexes[rid]
            hit = ((idx.center_lats >= lat_min) & (idx.center_lats <= lat_max)
                   & (idx.center_lons >= lon_min) & (idx.center_lons <= lon_max))
            for i in np.nonzero(hit)[0]:
                out.append(CellId(rid, int(idx.rows[i]), int(idx.cols[i])))
        return out

    def cells_in_polygon(self, poly: GeoPolygon) -> list[CellId]:
        """Bbox prefilter on the polygon's bounds, then exact center-in-polygon."""
        if poly.area_deg2() == 0.0:
            raise GeoError("degenerate polygon")
        lat_min, lat_max, lon_min, lon_max = poly.bbox()
        vlats, vlons = poly.arrays()
        out: list[CellId] = []
        for rid in sorted(self._indexes):
            idx = self._indexes[rid]
            hit = ((idx.center_lats >= lat_min) & (idx.center_lats <= lat_max)
                   & (idx.center_lons >= lon_min) & (idx.center_lons <= lon_max))
            cand = np.nonzero(hit)[0]
            if len(cand) == 0:
                continue
            inside = kernels.points_in_polygon(
                np.ascontiguousarray(idx.center_lats[cand]),
                np.ascontiguousarray(idx.center_lons[cand]), vlats, vlons)
            for i in cand[inside.astype(bool)]:
                out.append(CellId(rid, int(idx.rows[i]), int(idx.cols[i])))
        return out

    def nearest_cell(self, p: GeoPoint) -> tuple[CellId, float]:
        """Stored cell whose center is closest to p (equirectangular meters);
        ties break to the smallest CellId."""
        if self.is_empty:
            raise StoreError("store is empty")
        best: tuple[CellId, float] | None = None
        for rid in sorted(self._indexes):
            idx = self._indexes[rid]
            i, dist = kernels.nearest_index(p.lat, p.lon,
                                            idx.center_lats, idx.center_lons)
            cell = CellId(rid, int(idx.rows[i]), int(idx.cols[i]))
            if best is None or dist < best[1]:
                best = (cell, dist)
        return best

    def load_series(self, cell: CellId,
                    date_range: tuple[date | None, date | None] = (None, None)) -> CellSeries:
        """Samples of one cell with first <= date <= last; empty when the cell
        is unknown or nothing falls in the window."""
        first, last = date_range
        if first is not None and last is not None and first > last:
            raise ValueError("date range not ordered")
        idx = self._indexes.get(cell.region_id)
        if idx is None or (cell.row, cell.col) not in idx.by_rowcol:
            return CellSeries(cell, np.empty(0, dtype=np.int32),
                              np.empty(0, dtype=np.float32))
        i = idx.by_rowcol[(cell.row, cell.col)]
        lo, hi = idx.offsets[i], idx.offsets[i + 1]
        days = idx.days[lo:hi]
        values = idx.values[lo:hi]
        if first is not None:
            start = int(np.searchsorted(days, day_number(first), side="left"))
        else:
            start = 0
        if last is not None:
            stop = int(np.searchsorted(days, day_number(last), side="right"))
        else:
            stop = len(days)
        return CellSeries(cell, days[start:stop], values[start:stop])
