/** UI session state: the polygon under edit, the active date range, the last
 * report, and the chat transcript. At most one analyze request is in flight;
 * submitting again aborts the previous one. */

import { polygonProblem } from "./geometry.js";
import type { AnalysisReport, LatLon } from "./types.js";

export interface ChatEntry {
  role: "user" | "assistant" | "error";
  text: string;
}

export class UiState {
  vertices: LatLon[] = [];
  from: string | null = null;
  to: string | null = null;
  fitDegree = 3;
  report: AnalysisReport | null = null;
  transcript: ChatEntry[] = [];

  private inFlight: AbortController | null = null;

  addVertex(v: LatLon): void {
    this.vertices.push(v);
  }

  moveVertex(index: number, v: LatLon): void {
    if (index >= 0 && index < this.vertices.length) {
      this.vertices[index] = v;
    }
  }

  removeLastVertex(): void {
    this.vertices.pop();
  }

  clearPolygon(): void {
    this.vertices = [];
  }

  /** Null when the polygon may be submitted, else the validation message. */
  polygonProblem(): string | null {
    return polygonProblem(this.vertices);
  }

  /** Chat needs a report to ground the conversation. */
  chatEnabled(): boolean {
    return this.report !== null;
  }

  appendChat(entry: ChatEntry): void {
    this.transcript.push(entry);
  }

  clearTranscript(): void {
    this.transcript = [];
  }

  /** Aborts any in-flight analyze request and arms a new one. */
  beginAnalyze(): AbortController {
    this.inFlight?.abort();
    this.inFlight = new AbortController();
    return this.inFlight;
  }

  finishAnalyze(controller: AbortController, report: AnalysisReport | null): void {
    if (this.inFlight === controller) {
      this.inFlight = null;
    }
    if (report !== null) {
      this.report = report;
    }
  }
}
