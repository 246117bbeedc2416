/**
 * Typed client for the community evaluation service.
 *
 * The dashboard performs no settlement math of its own: every displayed
 * number originates from one of these endpoints.
 */

export interface HouseholdEconomics {
  cost_chf: number;
  savings_chf: number | null;
  savings_pct: number | null;
  peak_import_kw: number;
  peak_export_kw: number;
}

export interface MetricsReport {
  scr: number | null;
  ler_gen: number | null;
  ler_con: number | null;
  total_import_kwh: number;
  total_export_kwh: number;
  peak_import_kw: number;
  peak_export_kw: number;
  per_household: Record<string, HouseholdEconomics>;
}

export interface TariffConfig {
  retail_import: number;
  feed_in: number;
  local_price: number;
  network_fee: number;
  levies: number;
  gamma: number;
  levies_on_local: boolean;
}

export interface Fairness {
  local_price: number;
  cv: number | null;
  excluded_from_cv: string[];
  local_price_verdict: "fair" | "below_feed_in" | "above_energy_price";
}

export interface EvaluateResponse {
  meta: {
    scenario_name: string;
    scenario_hash: string;
    provenance: string[];
    tariffs: TariffConfig;
    fill_gaps: string | null;
  };
  reference: MetricsReport;
  lec: MetricsReport;
  deltas: Record<string, number | null>;
  fairness: Fairness;
}

export interface SweepPoint {
  local_price: number;
  cv: number | null;
  savings_chf: Record<string, number>;
  savings_pct: Record<string, number | null>;
}

export interface SweepResponse {
  price_grid: number[];
  per_price: SweepPoint[];
  fair_price: number | null;
  cv_min: number | null;
  excluded_from_cv: string[];
  unit_ids: string[];
}

export interface ScenarioInfo {
  token: string;
  name: string;
  description: string;
  provenance: string[];
  unit_ids: string[];
  n_intervals: number;
  resolution_minutes: number;
  tariffs: TariffConfig;
  fair_band: { low: number; high: number };
}

export interface UploadResult {
  token: string;
  name: string;
  unit_ids: string[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      /* non-JSON error body; keep the status line */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  scenarioInfo(token: string): Promise<ScenarioInfo> {
    return this.request(`/scenarios/${encodeURIComponent(token)}`);
  }

  evaluate(
    token: string,
    params: { local_price?: number; gamma?: number; levies_on_local?: boolean },
  ): Promise<EvaluateResponse> {
    const query = new URLSearchParams();
    if (params.local_price !== undefined) query.set("local_price", String(params.local_price));
    if (params.gamma !== undefined) query.set("gamma", String(params.gamma));
    if (params.levies_on_local !== undefined)
      query.set("levies_on_local", String(params.levies_on_local));
    return this.request(
      `/scenarios/${encodeURIComponent(token)}/evaluate?${query.toString()}`,
    );
  }

  sweep(token: string, min?: number, max?: number, step?: number): Promise<SweepResponse> {
    const query = new URLSearchParams();
    if (min !== undefined) query.set("min", String(min));
    if (max !== undefined) query.set("max", String(max));
    if (step !== undefined) query.set("step", String(step));
    const suffix = query.size > 0 ? `?${query.toString()}` : "";
    return this.request(`/scenarios/${encodeURIComponent(token)}/sweep${suffix}`);
  }

  async uploadScenario(
    metersCsv: string,
    tariffs: Record<string, unknown>,
    name: string,
  ): Promise<UploadResult> {
    const response = await this.fetchFn(`${this.baseUrl}/scenarios`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ meters_csv: metersCsv, tariffs, name }),
    });
    return asJson<UploadResult>(response);
  }

  private async request<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    return asJson<T>(response);
  }
}
