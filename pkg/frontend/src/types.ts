/** Shapes of the service responses the UI consumes. */

export interface LatLon {
  lat: number;
  lon: number;
}

export interface PolyFitDict {
  degree: number;
  coeffs: number[];
  t0: number;
  t1: number;
  rmse: number;
}

export interface CurveDict {
  points: [number, number][];
  normalized_points: [number, number][] | null;
  fit: PolyFitDict | null;
  fit_points: [number, number][] | null;
  contributing_cells: number;
}

export interface FeaturesDict {
  n_points: number;
  min: number;
  max: number;
  range: number;
  median: number;
  mean: number;
  growth_rate: number;
  decline_rate: number;
  peak_day: number;
}

export interface FireRow {
  lat: number;
  lon: number;
  date: string;
  confidence: number;
  distance_km: number;
}

export interface AnalysisReport {
  report_id: string;
  polygon: [number, number][];
  date_range: [string | null, string | null];
  cells_in_polygon: number;
  curve: CurveDict;
  features: FeaturesDict | null;
  class: string;
  presence: string | null;
  fire_history: FireRow[];
  llm_analysis?: Record<string, string>;
  warnings: string[];
  params_used: Record<string, number>;
}

export interface ManifestRegion {
  region_id: number;
  lat_min: number;
  lat_max: number;
  lon_min: number;
  lon_max: number;
  rows: number;
  cols: number;
}

export interface Manifest {
  version: number;
  extent: { lat_min: number; lat_max: number; lon_min: number; lon_max: number };
  regions: ManifestRegion[];
  date_range: [string, string] | null;
  counts: Record<string, { cells: number; samples: number }>;
}

export interface AnalyzeRequestBody {
  polygon: { vertices: number[][] };
  from?: string;
  to?: string;
  fit_degree?: number;
  include_llm?: boolean;
  params?: Record<string, number>;
}
