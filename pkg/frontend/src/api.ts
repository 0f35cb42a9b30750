// Typed client for the PPV prediction API. All numbers shown in the UI come
// from these responses; the client does no modeling of its own.

export interface PredictRequest {
  pile_size_mm: number;
  pile_length_m: number;
  hammer_weight_ton: number;
  drop_height_m: number;
  distance_m: number;
  sensor_location: number;
  sensor_direction: number;
}

export interface ShapPayload {
  baseline: number;
  prediction: number;
  phi: Record<string, number>;
}

export interface PredictResponse {
  ppv_mm_s: number;
  model_version: string;
  sensor_location: string;
  sensor_direction: string;
  warnings: string[];
  shap?: ShapPayload;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, public status: number | null = null) {
    super(message);
    this.name = "ApiError";
  }
}

/** Base URL resolution: window override at runtime, else same-origin default. */
export function defaultBaseUrl(): string {
  const override = (globalThis as { PPV_API_BASE?: string }).PPV_API_BASE;
  return override ?? "http://localhost:8080";
}

export class ApiClient {
  constructor(
    private baseUrl: string = defaultBaseUrl(),
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async post(path: string, body: unknown): Promise<PredictResponse> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(`network failure: ${(err as Error).message}`);
    }
    if (!response.ok) {
      let message = `request failed with status ${response.status}`;
      try {
        const payload = await response.json();
        if (payload && typeof payload.error === "string") {
          message = payload.error;
        }
      } catch {
        // non-JSON error body; keep the status message
      }
      throw new ApiError(message, response.status);
    }
    return (await response.json()) as PredictResponse;
  }

  predict(request: PredictRequest): Promise<PredictResponse> {
    return this.post("/predict", request);
  }

  explain(request: PredictRequest): Promise<PredictResponse> {
    return this.post("/explain", request);
  }
}
