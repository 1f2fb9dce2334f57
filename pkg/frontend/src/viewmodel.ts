/** Pure report -> view-model builders. Everything shown in the report panel
 * is lifted verbatim from the service response; the UI never derives a
 * classification or statistic itself. */

import type { AnalysisReport } from "./types.js";

const CLASS_LABELS: Record<string, string> = {
  AnnualCrop: "Annual crop",
  PerennialVegetation: "Perennial vegetation",
  SparseVegetation: "Sparse vegetation",
  NonVegetative: "Non-vegetative",
  InsufficientData: "Insufficient data",
};

const CLASS_TONES: Record<string, string> = {
  AnnualCrop: "badge-crop",
  PerennialVegetation: "badge-perennial",
  SparseVegetation: "badge-sparse",
  NonVegetative: "badge-bare",
  InsufficientData: "badge-muted",
};

export interface BadgeView {
  label: string;
  tone: string;
}

export interface CurveView {
  /** raw mean samples, drawn as markers */
  raw: [number, number][];
  /** polynomial fit, drawn as a continuous line */
  fit: [number, number][] | null;
  fitDegree: number | null;
  contributingCells: number;
}

export interface ReportView {
  badge: BadgeView;
  presence: string | null;
  features: [string, string][];
  curve: CurveView;
  warnings: string[];
  fires: string[];
  llmRows: [string, string][];
  insufficient: boolean;
}

function fmt(x: number): string {
  return x.toFixed(4);
}

export function classBadge(reportClass: string): BadgeView {
  return {
    label: CLASS_LABELS[reportClass] ?? reportClass,
    tone: CLASS_TONES[reportClass] ?? "badge-muted",
  };
}

export function reportView(report: AnalysisReport, insufficient = false): ReportView {
  const features: [string, string][] = [];
  const f = report.features;
  if (f) {
    features.push(
      ["Samples", String(f.n_points)],
      ["Max NDVI", fmt(f.max)],
      ["Min NDVI", fmt(f.min)],
      ["Median", fmt(f.median)],
      ["Mean", fmt(f.mean)],
      ["Range", fmt(f.range)],
      ["Max rise", fmt(f.growth_rate)],
      ["Max drop", fmt(f.decline_rate)],
      ["Peak day", String(f.peak_day)],
    );
  }
  return {
    badge: classBadge(report.class),
    presence: report.presence,
    features,
    curve: {
      raw: report.curve.points,
      fit: report.curve.fit_points,
      fitDegree: report.curve.fit?.degree ?? null,
      contributingCells: report.curve.contributing_cells,
    },
    warnings: report.warnings,
    fires: report.fire_history.map(
      (row) =>
        `${row.date} — ${row.distance_km.toFixed(1)} km away ` +
        `(${(row.lat).toFixed(3)}, ${(row.lon).toFixed(3)}), ` +
        `confidence ${(row.confidence * 100).toFixed(0)}%`,
    ),
    llmRows: Object.entries(report.llm_analysis ?? {}),
    insufficient,
  };
}
