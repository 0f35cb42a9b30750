// What-if distance sweep: vary only distance over a grid and collect the
// API's predictions. At most one sweep runs at a time; starting a new one
// cancels the previous (its remaining points are dropped).

import type { ApiClient, PredictRequest } from "./api.js";

export interface SweepPoint {
  distance: number;
  ppv: number | null; // null marks a failed call (gap in the chart)
}

export interface SweepResult {
  points: SweepPoint[];
  failures: number;
  cancelled: boolean;
}

export class SweepController {
  private cancelledFlag = false;

  cancel(): void {
    this.cancelledFlag = true;
  }

  get cancelled(): boolean {
    return this.cancelledFlag;
  }
}

export function distanceGrid(dMin: number, dMax: number, steps: number): number[] {
  if (!(dMin > 0)) throw new Error("minimum distance must be positive");
  if (!(dMin < dMax)) throw new Error("minimum distance must be below maximum");
  if (!Number.isInteger(steps) || steps < 2) throw new Error("steps must be an integer >= 2");
  const grid: number[] = [];
  for (let i = 0; i < steps; i++) {
    grid.push(dMin + ((dMax - dMin) * i) / (steps - 1));
  }
  return grid;
}

export async function distanceSweep(
  base: PredictRequest,
  dMin: number,
  dMax: number,
  steps: number,
  client: Pick<ApiClient, "predict">,
  controller: SweepController = new SweepController(),
): Promise<SweepResult> {
  const grid = distanceGrid(dMin, dMax, steps);
  const points: SweepPoint[] = [];
  let failures = 0;
  for (const distance of grid) {
    if (controller.cancelled) {
      return { points, failures, cancelled: true };
    }
    try {
      const response = await client.predict({ ...base, distance_m: distance });
      points.push({ distance, ppv: response.ppv_mm_s });
    } catch {
      points.push({ distance, ppv: null });
      failures++;
    }
  }
  return { points, failures, cancelled: false };
}
