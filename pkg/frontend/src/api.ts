// Typed client for the risk service. The UI never computes risk itself;
// every number it shows originates from these payloads.

export interface ZoneInfo {
  id: string;
  x: number;
  y: number;
  population: number;
  infection_rate: number;
}

export interface PathAttributes {
  walk_time_h: number;
  wait_time_h: number;
  in_vehicle_time_h: number;
  monetary_cost: number;
  commonality: number;
}

export interface SegmentRisk {
  mode: string;
  duration_h: number;
  contact_mean: number;
  contact_se: number;
  surface_mean: number;
  surface_se: number;
}

export interface PathRisk {
  choice_prob: number;
  travel_time_h: number;
  mean_probability: number;
  std_error: number;
  attributes: PathAttributes;
  segments: SegmentRisk[];
}

export interface RiskResponse {
  mean_probability: number;
  std_error: number;
  paths: PathRisk[];
  warnings: string[];
}

export interface SweepCell {
  key: string;
  status: string;
  mean: number;
  std_error: number;
  scaled_error: number;
}

export interface RiskRequest {
  origin: string;
  destination: string;
  depart: string;
  mode: string;
  k: number;
}

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, detail: string) {
    super(detail);
    this.code = code;
    this.status = status;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "INTERNAL";
  let detail = `${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.code === "string") code = body.code;
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, code, detail);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  async zones(): Promise<ZoneInfo[]> {
    const response = await fetch(`${this.baseUrl}/zones`);
    if (!response.ok) throw await parseError(response);
    const body = await response.json();
    return body.zones as ZoneInfo[];
  }

  async risk(request: RiskRequest, signal?: AbortSignal): Promise<RiskResponse> {
    const response = await fetch(`${this.baseUrl}/risk`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
      signal,
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as RiskResponse;
  }

  async sweep(mode: string, dest: string, stepH = 1.0): Promise<SweepCell[]> {
    const params = new URLSearchParams({
      kind: "temporal",
      mode,
      dest,
      step_h: String(stepH),
    });
    const response = await fetch(`${this.baseUrl}/sweep?${params}`);
    if (!response.ok) throw await parseError(response);
    const body = await response.json();
    return body.cells as SweepCell[];
  }
}
