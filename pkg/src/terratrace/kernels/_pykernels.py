"""Numpy fallback implementations of the query kernels.

Kept formula-identical to the compiled versions in ``_ckernels.pyx``:
even-odd ray casting with boundary points counted as inside, and
equirectangular nearest-neighbor scan with first-wins tie breaking.
"""

from __future__ import annotations

import math

import numpy as np

METERS_PER_DEG_LAT = 111_320.0


def points_in_polygon(lats: np.ndarray, lons: np.ndarray,
                      vlats: np.ndarray, vlons: np.ndarray) -> np.ndarray:
    """Even-odd containment of many points in one polygon.

    Vertices are the open ring (first vertex not repeated).  Returns a uint8
    array: 1 inside or on the boundary, 0 outside.
    """
    px = np.asarray(lons, dtype=np.float64)
    py = np.asarray(lats, dtype=np.float64)
    inside = np.zeros(px.shape, dtype=bool)
    on_edge = np.zeros(px.shape, dtype=bool)
    n = len(vlats)
    for i in range(n):
        y1, x1 = vlats[i], vlons[i]
        y2, x2 = vlats[(i + 1) % n], vlons[(i + 1) % n]
        cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
        on_edge |= ((cross == 0.0)
                    & (px >= min(x1, x2)) & (px <= max(x1, x2))
                    & (py >= min(y1, y2)) & (py <= max(y1, y2)))
        spans = (y1 > py) != (y2 > py)
        if np.any(spans):
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = (x2 - x1) * (py - y1) / (y2 - y1) + x1
            inside ^= spans & (px < xint)
    return (inside | on_edge).astype(np.uint8)


def nearest_index(lat: float, lon: float,
                  clats: np.ndarray, clons: np.ndarray) -> tuple[int, float]:
    """Index of the center minimizing equirectangular distance to (lat, lon).

    Ties resolve to the lowest index (argmin returns the first minimum).
    Returns (index, distance in meters).
    """
    if len(clats) == 0:
        raise ValueError("empty centers")
    dy = (clats - lat) * METERS_PER_DEG_LAT
    mid = np.radians((clats + lat) * 0.5)
    dx = (clons - lon) * METERS_PER_DEG_LAT * np.cos(mid)
    d2 = dx * dx + dy * dy
    idx = int(np.argmin(d2))
    return idx, math.sqrt(float(d2[idx]))
