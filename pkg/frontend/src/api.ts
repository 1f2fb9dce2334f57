/** Typed client for the analysis service. Every number the UI displays
 * originates from these responses; nothing is recomputed client-side. */

import type { AnalysisReport, AnalyzeRequestBody, Manifest } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export interface AnalyzeResult {
  report: AnalysisReport;
  /** 422: the window held too few points; the report is partial. */
  insufficient: boolean;
  /** 502: report present but the LLM leg failed; retry may help. */
  llmFailed: boolean;
}

async function detailOf(response: Response): Promise<string> {
  try {
    const body = await response.json();
    return typeof body?.detail === "string" ? body.detail : response.statusText;
  } catch {
    return response.statusText;
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async analyze(body: AnalyzeRequestBody, signal?: AbortSignal): Promise<AnalyzeResult> {
    const response = await this.fetchFn(this.url("/api/analyze"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (response.status === 200 || response.status === 422 || response.status === 502) {
      const report = (await response.json()) as AnalysisReport;
      if (!report.report_id) {
        throw new ApiError(response.status, "response is not an analysis report");
      }
      return {
        report,
        insufficient: response.status === 422,
        llmFailed: response.status === 502,
      };
    }
    throw new ApiError(response.status, await detailOf(response));
  }

  async chat(message: string, reportId: string): Promise<string> {
    const response = await this.fetchFn(this.url("/api/chat"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ message, report_id: reportId }),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    const body = await response.json();
    return String(body.reply ?? "");
  }

  async manifest(): Promise<Manifest> {
    const response = await this.fetchFn(this.url("/api/manifest"));
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    return (await response.json()) as Manifest;
  }
}
