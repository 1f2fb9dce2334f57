# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled query kernels: even-odd point-in-polygon and the
equirectangular nearest-neighbor scan.  Formula-identical to the numpy
fallback in ``_pykernels.py``."""

from libc.math cimport cos, sqrt, fmin, fmax

import numpy as np

cdef double METERS_PER_DEG_LAT = 111320.0
cdef double DEG_TO_RAD = 0.017453292519943295


def points_in_polygon(double[::1] lats not None, double[::1] lons not None,
                      double[::1] vlats not None, double[::1] vlons not None):
    """Even-odd containment of many points in one polygon (open ring).

    Returns a uint8 array: 1 inside or on the boundary, 0 outside.
    """
    cdef Py_ssize_t npts = lats.shape[0]
    cdef Py_ssize_t nv = vlats.shape[0]
    out_arr = np.zeros(npts, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    cdef Py_ssize_t k, i, j
    cdef double px, py, x1, y1, x2, y2, cross, xint
    cdef bint inside, on_edge

    for k in range(npts):
        px = lons[k]
        py = lats[k]
        inside = False
        on_edge = False
        j = nv - 1
        for i in range(nv):
            y1 = vlats[j]
            x1 = vlons[j]
            y2 = vlats[i]
            x2 = vlons[i]
            cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
            if (cross == 0.0
                    and fmin(x1, x2) <= px <= fmax(x1, x2)
                    and fmin(y1, y2) <= py <= fmax(y1, y2)):
                on_edge = True
                break
            if (y1 > py) != (y2 > py):
                xint = (x2 - x1) * (py - y1) / (y2 - y1) + x1
                if px < xint:
                    inside = not inside
            j = i
        out[k] = 1 if (inside or on_edge) else 0
    return out_arr


def nearest_index(double lat, double lon,
                  double[::1] clats not None, double[::1] clons not None):
    """Index of the center minimizing equirectangular distance to (lat, lon).

    Ties resolve to the lowest index.  Returns (index, distance in meters).
    """
    cdef Py_ssize_t n = clats.shape[0]
    if n == 0:
        raise ValueError("empty centers")
    cdef Py_ssize_t i, best = 0
    cdef double dy, dx, mid, d2, best_d2 = -1.0
    for i in range(n):
        dy = (clats[i] - lat) * METERS_PER_DEG_LAT
        mid = (clats[i] + lat) * 0.5 * DEG_TO_RAD
        dx = (clons[i] - lon) * METERS_PER_DEG_LAT * cos(mid)
        d2 = dx * dx + dy * dy
        if best_d2 < 0.0 or d2 < best_d2:
            best_d2 = d2
            best = i
    return best, sqrt(best_d2)
