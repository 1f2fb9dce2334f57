"""Observation parsing, cloud filtering, NDVI computation, and grid assignment.

The input is the observation CSV (header ``lat,lon,date,red,nir,cloud_fraction``,
RFC 4180 quoting, ISO 8601 dates), the offline stand-in for satellite archive
access.  Reflectances are Sentinel-2 style: ``red`` is the visible red band,
``nir`` the near-infrared band, both in [0, 1].
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import date

from terratrace.geo import CellId, GeoError, GeoPoint, RegionSpec, cell_of, region_of

OBSERVATION_HEADER = ["lat", "lon", "date", "red", "nir", "cloud_fraction"]

DEFAULT_CLOUD_MAX_RATIO = 0.10


class IngestError(ValueError):
    """Unrecoverable input problem (bad header, undecodable stream)."""


class UndefinedNdvi(ArithmeticError):
    """NDVI is undefined because nir + red = 0; the sample must be dropped."""


@dataclass(frozen=True)
class Observation:
    point: GeoPoint
    date: date
    red: float
    nir: float
    cloud_fraction: float


@dataclass(frozen=True)
class NdviSample:
    cell: CellId
    date: date
    ndvi: float


@dataclass
class RowError:
    line: int
    message: str


@dataclass
class ParseResult:
    observations: list[Observation] = field(default_factory=list)
    errors: list[RowError] = field(default_factory=list)

    @property
    def rows(self) -> int:
        return len(self.observations) + len(self.errors)


def _parse_ratio(name: str, raw: str, lo: float = 0.0, hi: float = 1.0) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{name} is not a number: {raw!r}")
    if not lo <= value <= hi:
        raise ValueError(f"{name} out of range [{lo:g},{hi:g}]")
    return value


def parse_observations(source) -> ParseResult:
    """Parse the observation CSV from a binary/text stream or bytes.

    Valid rows become observations in file order; rows failing validation are
    collected as errors with their line numbers.  An empty stream yields an
    empty result; a wrong header raises IngestError("bad header").
    """
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
        return ParseResult()
    if [h.strip() for h in header] != OBSERVATION_HEADER:
        raise IngestError(f"bad header: expected {','.join(OBSERVATION_HEADER)}")

    result = ParseResult()
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 6:
            result.errors.append(RowError(line, f"expected 6 fields, got {len(row)}"))
            continue
        try:
            lat = float(row[0])
            lon = float(row[1])
            when = date.fromisoformat(row[2].strip())
            red = _parse_ratio("red", row[3])
            nir = _parse_ratio("nir", row[4])
            cloud = _parse_ratio("cloud_fraction", row[5])
            point = GeoPoint(lat, lon)
        except (ValueError, GeoError) as exc:
            result.errors.append(RowError(line, str(exc)))
            continue
        result.observations.append(Observation(point, when, red, nir, cloud))
    return result


def filter_clouds(obs: list[Observation],
                  max_ratio: float = DEFAULT_CLOUD_MAX_RATIO) -> list[Observation]:
    """Keep observations with cloud_fraction <= max_ratio, order preserved.

    The boundary stays: only a cloud mask ratio strictly over the threshold
    is removed.
    """
    if not 0.0 <= max_ratio <= 1.0:
        raise ValueError(f"max_ratio out of range [0,1]: {max_ratio}")
    return [o for o in obs if o.cloud_fraction <= max_ratio]


def compute_ndvi(nir: float, red: float) -> float:
    """(nir - red) / (nir + red); raises UndefinedNdvi when nir + red = 0."""
    denom = nir + red
    if denom == 0.0:
        raise UndefinedNdvi("undefined NDVI: nir + red = 0")
    return (nir - red) / denom


@dataclass
class GridAssignStats:
    out_of_extent: int = 0
    undefined_ndvi: int = 0


def grid_assign(obs: list[Observation],
                regions: list[RegionSpec]) -> tuple[list[NdviSample], GridAssignStats]:
    """Turn cloud-filtered observations into per-cell NDVI samples.

    Observations outside the extent and NDVI-undefined ones are skipped and
    counted, never imputed.  Count conservation holds:
    len(obs) == len(samples) + out_of_extent + undefined_ndvi.
    """
    by_id = {r.region_id: r for r in regions}
    samples: list[NdviSample] = []
    stats = GridAssignStats()
    for o in obs:
        rid = region_of(o.point, regions)
        if rid is None:
            stats.out_of_extent += 1
            continue
        try:
            ndvi = compute_ndvi(o.nir, o.red)
        except UndefinedNdvi:
            stats.undefined_ndvi += 1
            continue
        samples.append(NdviSample(cell_of(o.point, by_id[rid]), o.date, ndvi))
    return samples, stats
