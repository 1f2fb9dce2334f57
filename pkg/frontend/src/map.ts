/** Canvas map with polygon editing.
 *
 * Works as a plain lat/lon grid when offline (the default); a slippy-tile
 * URL template ({z}/{x}/{y}) can be configured to draw a raster backdrop.
 * Interactions: click adds a vertex, dragging a handle moves it, wheel
 * zooms, shift+drag pans.
 */

import { polygonBounds } from "./geometry.js";
import type { LatLon } from "./types.js";

const HANDLE_PX = 6;

export interface MapOptions {
  tileUrlTemplate?: string | null;
  onChange?: (vertices: LatLon[]) => void;
}

export class MapView {
  private centerLat = 36.0;
  private centerLon = -120.0;
  private degPerPx = 0.0008;
  private vertices: LatLon[] = [];
  private dragIndex = -1;
  private panning = false;
  private lastPointer: [number, number] | null = null;
  private tiles = new Map<string, HTMLImageElement>();

  constructor(
    private canvas: HTMLCanvasElement,
    private options: MapOptions = {},
  ) {
    canvas.addEventListener("pointerdown", (e) => this.onDown(e));
    canvas.addEventListener("pointermove", (e) => this.onMove(e));
    canvas.addEventListener("pointerup", (e) => this.onUp(e));
    canvas.addEventListener("wheel", (e) => this.onWheel(e), { passive: false });
  }

  setVertices(vertices: LatLon[]): void {
    this.vertices = vertices.slice();
    this.render();
  }

  getVertices(): LatLon[] {
    return this.vertices.slice();
  }

  focus(center: LatLon, spanDeg: number): void {
    this.centerLat = center.lat;
    this.centerLon = center.lon;
    this.degPerPx = spanDeg / Math.min(this.canvas.width, this.canvas.height);
    this.render();
  }

  focusPolygon(): void {
    if (this.vertices.length === 0) return;
    const b = polygonBounds(this.vertices);
    this.focus(
      { lat: (b.latMin + b.latMax) / 2, lon: (b.lonMin + b.lonMax) / 2 },
      Math.max(b.latMax - b.latMin, b.lonMax - b.lonMin) * 1.6 || 0.05,
    );
  }

  toPixel(p: LatLon): [number, number] {
    const x = this.canvas.width / 2 + (p.lon - this.centerLon) / this.degPerPx;
    const y = this.canvas.height / 2 - (p.lat - this.centerLat) / this.degPerPx;
    return [x, y];
  }

  toGeo(x: number, y: number): LatLon {
    return {
      lat: this.centerLat - (y - this.canvas.height / 2) * this.degPerPx,
      lon: this.centerLon + (x - this.canvas.width / 2) * this.degPerPx,
    };
  }

  private hitVertex(x: number, y: number): number {
    for (let i = 0; i < this.vertices.length; i++) {
      const [vx, vy] = this.toPixel(this.vertices[i]!);
      if (Math.hypot(vx - x, vy - y) <= HANDLE_PX + 2) return i;
    }
    return -1;
  }

  private notify(): void {
    this.options.onChange?.(this.getVertices());
  }

  private onDown(e: PointerEvent): void {
    const rect = this.canvas.getBoundingClientRect();
    const x = e.clientX - rect.left;
    const y = e.clientY - rect.top;
    if (e.shiftKey) {
      this.panning = true;
      this.lastPointer = [x, y];
      return;
    }
    const hit = this.hitVertex(x, y);
    if (hit >= 0) {
      this.dragIndex = hit;
    } else {
      this.vertices.push(this.toGeo(x, y));
      this.notify();
      this.render();
    }
    this.canvas.setPointerCapture(e.pointerId);
  }

  private onMove(e: PointerEvent): void {
    const rect = this.canvas.getBoundingClientRect();
    const x = e.clientX - rect.left;
    const y = e.clientY - rect.top;
    if (this.panning && this.lastPointer) {
      const [lx, ly] = this.lastPointer;
      this.centerLon -= (x - lx) * this.degPerPx;
      this.centerLat += (y - ly) * this.degPerPx;
      this.lastPointer = [x, y];
      this.render();
      return;
    }
    if (this.dragIndex >= 0) {
      this.vertices[this.dragIndex] = this.toGeo(x, y);
      this.render();
    }
  }

  private onUp(e: PointerEvent): void {
    if (this.dragIndex >= 0) this.notify();
    this.dragIndex = -1;
    this.panning = false;
    this.lastPointer = null;
    if (this.canvas.hasPointerCapture(e.pointerId)) {
      this.canvas.releasePointerCapture(e.pointerId);
    }
  }

  private onWheel(e: WheelEvent): void {
    e.preventDefault();
    const factor = e.deltaY > 0 ? 1.2 : 1 / 1.2;
    this.degPerPx = Math.min(0.2, Math.max(1e-6, this.degPerPx * factor));
    this.render();
  }

  render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.fillStyle = "#f3f6f4";
    ctx.fillRect(0, 0, width, height);
    if (this.options.tileUrlTemplate) {
      this.drawTiles(ctx);
    }
    this.drawGraticule(ctx);
    this.drawPolygon(ctx);
  }

  private drawGraticule(ctx: CanvasRenderingContext2D): void {
    const { width, height } = this.canvas;
    const spanLon = width * this.degPerPx;
    const step = niceStep(spanLon / 6);
    ctx.strokeStyle = "rgba(70, 90, 110, 0.18)";
    ctx.fillStyle = "#687";
    ctx.font = "10px sans-serif";
    ctx.lineWidth = 1;
    const west = this.toGeo(0, height).lon;
    const east = this.toGeo(width, 0).lon;
    for (let lon = Math.ceil(west / step) * step; lon <= east; lon += step) {
      const [x] = this.toPixel({ lat: this.centerLat, lon });
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, height);
      ctx.stroke();
      ctx.fillText(lon.toFixed(3), x + 2, height - 4);
    }
    const south = this.toGeo(0, height).lat;
    const north = this.toGeo(0, 0).lat;
    for (let lat = Math.ceil(south / step) * step; lat <= north; lat += step) {
      const [, y] = this.toPixel({ lat, lon: this.centerLon });
      ctx.beginPath();
      ctx.moveTo(0, y);
      ctx.lineTo(width, y);
      ctx.stroke();
      ctx.fillText(lat.toFixed(3), 4, y - 2);
    }
  }

  private drawPolygon(ctx: CanvasRenderingContext2D): void {
    if (this.vertices.length === 0) return;
    const pixels = this.vertices.map((v) => this.toPixel(v));
    if (pixels.length >= 2) {
      ctx.beginPath();
      pixels.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
      if (pixels.length >= 3) {
        ctx.closePath();
        ctx.fillStyle = "rgba(37, 99, 235, 0.12)";
        ctx.fill();
      }
      ctx.strokeStyle = "#2563eb";
      ctx.lineWidth = 2;
      ctx.stroke();
    }
    for (const [x, y] of pixels) {
      ctx.beginPath();
      ctx.arc(x, y, HANDLE_PX, 0, 2 * Math.PI);
      ctx.fillStyle = "#ffffff";
      ctx.fill();
      ctx.strokeStyle = "#1e40af";
      ctx.lineWidth = 2;
      ctx.stroke();
    }
  }

  private drawTiles(ctx: CanvasRenderingContext2D): void {
    const template = this.options.tileUrlTemplate!;
    const zoom = Math.max(1, Math.min(18,
      Math.round(Math.log2(360 / (this.degPerPx * 256)))));
    const n = 2 ** zoom;
    const { width, height } = this.canvas;
    const nw = this.toGeo(0, 0);
    const se = this.toGeo(width, height);
    const x0 = Math.floor(((nw.lon + 180) / 360) * n);
    const x1 = Math.floor(((se.lon + 180) / 360) * n);
    const y0 = Math.floor(latToTileY(nw.lat, n));
    const y1 = Math.floor(latToTileY(se.lat, n));
    for (let tx = x0; tx <= x1; tx++) {
      for (let ty = y0; ty <= y1; ty++) {
        const key = `${zoom}/${tx}/${ty}`;
        let img = this.tiles.get(key);
        if (!img) {
          img = new Image();
          img.src = template
            .replace("{z}", String(zoom))
            .replace("{x}", String(tx))
            .replace("{y}", String(ty));
          img.onload = () => this.render();
          this.tiles.set(key, img);
        }
        if (img.complete && img.naturalWidth > 0) {
          const lonW = (tx / n) * 360 - 180;
          const lonE = ((tx + 1) / n) * 360 - 180;
          const latN = tileYToLat(ty, n);
          const latS = tileYToLat(ty + 1, n);
          const [px0, py0] = this.toPixel({ lat: latN, lon: lonW });
          const [px1, py1] = this.toPixel({ lat: latS, lon: lonE });
          ctx.drawImage(img, px0, py0, px1 - px0, py1 - py0);
        }
      }
    }
  }
}

function niceStep(raw: number): number {
  const pow = 10 ** Math.floor(Math.log10(raw));
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * pow) return m * pow;
  }
  return 10 * pow;
}

function latToTileY(lat: number, n: number): number {
  const rad = (lat * Math.PI) / 180;
  return ((1 - Math.log(Math.tan(rad) + 1 / Math.cos(rad)) / Math.PI) / 2) * n;
}

function tileYToLat(y: number, n: number): number {
  const t = Math.PI * (1 - (2 * y) / n);
  return (Math.atan(Math.sinh(t)) * 180) / Math.PI;
}
