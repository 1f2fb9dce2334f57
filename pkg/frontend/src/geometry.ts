/** Client-side polygon validation and coordinate formatting. The service
 * re-validates everything; these checks only block obviously bad requests
 * before they leave the browser. */

import type { LatLon } from "./types.js";

/** Coordinates travel with six decimal places (~0.1 m), matching what the
 * service echoes back in prompts and reports. */
export function roundCoord(x: number): number {
  return Math.round(x * 1e6) / 1e6;
}

export function samePoint(a: LatLon, b: LatLon): boolean {
  return roundCoord(a.lat) === roundCoord(b.lat) && roundCoord(a.lon) === roundCoord(b.lon);
}

/** Returns a human-readable problem, or null when the polygon is sendable. */
export function polygonProblem(vertices: LatLon[]): string | null {
  if (vertices.length < 3) {
    return `a polygon needs at least 3 vertices (${vertices.length} drawn)`;
  }
  for (const v of vertices) {
    if (!Number.isFinite(v.lat) || !Number.isFinite(v.lon)) {
      return "polygon has a non-finite coordinate";
    }
    if (Math.abs(v.lat) > 90 || Math.abs(v.lon) > 180) {
      return "polygon has a coordinate outside lat/lon bounds";
    }
  }
  const first = vertices[0]!;
  const last = vertices[vertices.length - 1]!;
  if (vertices.length > 1 && samePoint(first, last)) {
    return "remove the repeated closing vertex; the polygon closes itself";
  }
  for (let i = 0; i + 1 < vertices.length; i++) {
    if (samePoint(vertices[i]!, vertices[i + 1]!)) {
      return "two consecutive vertices coincide";
    }
  }
  return null;
}

/** Vertices as the service wants them: [lat, lon] pairs, six decimals. */
export function toRequestVertices(vertices: LatLon[]): number[][] {
  return vertices.map((v) => [roundCoord(v.lat), roundCoord(v.lon)]);
}

export function polygonBounds(vertices: LatLon[]) {
  const lats = vertices.map((v) => v.lat);
  const lons = vertices.map((v) => v.lon);
  return {
    latMin: Math.min(...lats),
    latMax: Math.max(...lats),
    lonMin: Math.min(...lons),
    lonMax: Math.max(...lons),
  };
}
