// DOM rendering for the SHAP bar list and the distance-sweep line chart.
// Pure presentation: every number drawn here came from an API response.

import type { ShapPayload } from "./api.js";
import type { SweepPoint } from "./sweep.js";

const FEATURE_LABELS: Record<string, string> = {
  pile_size_mm: "Pile width (mm)",
  pile_length_m: "Pile length (m)",
  hammer_weight_ton: "Weight (ton)",
  drop_height_m: "Drop height (m)",
  distance_m: "Distance (m)",
  sensor_location: "Location",
  sensor_direction: "Trigger",
};

/** Signed horizontal bars sorted by |phi|, largest first. */
export function renderShapBars(container: HTMLElement, shap: ShapPayload): void {
  container.textContent = "";
  const entries = Object.entries(shap.phi).sort(
    (a, b) => Math.abs(b[1]) - Math.abs(a[1]),
  );
  const maxAbs = Math.max(...entries.map(([, v]) => Math.abs(v)), 1e-12);

  for (const [feature, phi] of entries) {
    const row = document.createElement("div");
    row.className = "shap-row";
    row.dataset.feature = feature;

    const label = document.createElement("span");
    label.className = "shap-label";
    label.textContent = FEATURE_LABELS[feature] ?? feature;

    const bar = document.createElement("span");
    bar.className = `shap-bar ${phi >= 0 ? "positive" : "negative"}`;
    bar.style.width = `${(Math.abs(phi) / maxAbs) * 100}%`;

    const value = document.createElement("span");
    value.className = "shap-value";
    value.textContent = `${phi.toFixed(3)} mm/s`;

    row.append(label, bar, value);
    container.append(row);
  }
}

/** Polyline chart of ppv vs distance; null points break the line. */
export function renderSweepChart(container: HTMLElement, points: SweepPoint[]): void {
  container.textContent = "";
  if (points.length === 0) return;

  const width = 480;
  const height = 240;
  const pad = 36;
  const xs = points.map((p) => p.distance);
  const ys = points.filter((p) => p.ppv !== null).map((p) => p.ppv as number);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMax = ys.length ? Math.max(...ys) : 1;

  const xPix = (d: number) =>
    pad + ((d - xMin) / Math.max(xMax - xMin, 1e-12)) * (width - 2 * pad);
  const yPix = (v: number) => height - pad - (v / Math.max(yMax, 1e-12)) * (height - 2 * pad);

  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "sweep-chart");

  // Split into contiguous segments at failed points.
  let segment: SweepPoint[] = [];
  const segments: SweepPoint[][] = [];
  for (const point of points) {
    if (point.ppv === null) {
      if (segment.length) segments.push(segment);
      segment = [];
    } else {
      segment.push(point);
    }
  }
  if (segment.length) segments.push(segment);

  for (const seg of segments) {
    const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
    line.setAttribute(
      "points",
      seg.map((p) => `${xPix(p.distance)},${yPix(p.ppv as number)}`).join(" "),
    );
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", "#2563eb");
    line.setAttribute("stroke-width", "2");
    svg.append(line);
  }

  for (const point of points) {
    const marker = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    marker.setAttribute("cx", String(xPix(point.distance)));
    marker.dataset.distance = String(point.distance);
    if (point.ppv === null) {
      marker.setAttribute("cy", String(height - pad));
      marker.setAttribute("r", "3");
      marker.setAttribute("fill", "#dc2626");
      marker.dataset.failed = "true";
    } else {
      marker.setAttribute("cy", String(yPix(point.ppv)));
      marker.setAttribute("r", "2.5");
      marker.setAttribute("fill", "#2563eb");
      marker.dataset.ppv = String(point.ppv);
    }
    svg.append(marker);
  }

  container.append(svg);
}
