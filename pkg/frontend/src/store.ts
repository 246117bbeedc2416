/**
 * View-model for the negotiation dashboard.
 *
 * Holds the selected scenario, the sweep curve, and the evaluation at the
 * current price. All numbers shown anywhere in the UI come from service
 * responses held here; the presenter below only rounds them for display.
 *
 * Concurrency: every evaluate request carries a sequence number and only
 * the newest one may update the state, so a slow stale response can never
 * overwrite a fresher one. Service failures raise a banner and keep the
 * last good view.
 */

import {
  ApiClient,
  ApiError,
  EvaluateResponse,
  ScenarioInfo,
  SweepResponse,
} from "./api.js";
import { formatChf, formatCv, formatPct, formatPrice } from "./format.js";

export interface NegotiationState {
  token: string | null;
  info: ScenarioInfo | null;
  sweep: SweepResponse | null;
  evaluation: EvaluateResponse | null;
  currentPrice: number | null;
  gamma: number | null;
  banner: string | null;
  busy: boolean;
}

export type Listener = (state: NegotiationState) => void;

export class NegotiationStore {
  private state: NegotiationState = {
    token: null,
    info: null,
    sweep: null,
    evaluation: null,
    currentPrice: null,
    gamma: null,
    banner: null,
    busy: false,
  };
  private evaluateSeq = 0;
  private appliedSeq = 0;
  private listeners: Listener[] = [];

  constructor(private readonly api: ApiClient) {}

  getState(): NegotiationState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private update(patch: Partial<NegotiationState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Select a scenario by token: fetch info, the sweep, and an initial
   * evaluation at the scenario's configured internal price. */
  async selectScenario(token: string): Promise<void> {
    this.update({ busy: true, banner: null });
    try {
      const info = await this.api.scenarioInfo(token);
      const sweep = await this.api.sweep(token);
      this.update({ token, info, sweep, gamma: info.tariffs.gamma });
      await this.onPriceChange(info.tariffs.local_price);
    } catch (err) {
      this.update({ banner: describeError(err) });
    } finally {
      this.update({ busy: false });
    }
  }

  /** Evaluate the scenario at a new internal price; newest request wins. */
  async onPriceChange(price: number): Promise<void> {
    const token = this.state.token;
    if (token === null) return;
    const seq = ++this.evaluateSeq;
    try {
      const params: { local_price: number; gamma?: number } = { local_price: price };
      if (this.state.gamma !== null) params.gamma = this.state.gamma;
      const evaluation = await this.api.evaluate(token, params);
      if (seq <= this.appliedSeq) return; // a newer response already rendered
      this.appliedSeq = seq;
      this.update({ evaluation, currentPrice: price, banner: null });
    } catch (err) {
      if (seq > this.appliedSeq) this.update({ banner: describeError(err) });
    }
  }

  /** Change the network-charge reduction factor and re-evaluate. */
  async onGammaChange(gamma: number): Promise<void> {
    this.update({ gamma });
    const price = this.state.currentPrice ?? this.state.info?.tariffs.local_price;
    if (price !== undefined && price !== null) await this.onPriceChange(price);
  }

  /** Upload a meter CSV (+ optional tariff JSON text) as a new session. */
  async loadScenarioFile(
    metersCsv: string,
    tariffsJson: string,
    name: string,
  ): Promise<void> {
    if (metersCsv.trim() === "") {
      this.update({ banner: "meter CSV file is empty" });
      return;
    }
    let tariffs: Record<string, unknown> = {};
    if (tariffsJson.trim() !== "") {
      try {
        tariffs = JSON.parse(tariffsJson) as Record<string, unknown>;
      } catch {
        this.update({ banner: "tariff file is not valid JSON" });
        return;
      }
    }
    this.update({ busy: true });
    try {
      const uploaded = await this.api.uploadScenario(metersCsv, tariffs, name);
      await this.selectScenario(uploaded.token);
    } catch (err) {
      // 400 bodies carry row-level detail from the service; show verbatim
      this.update({ banner: describeError(err), busy: false });
    }
  }
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  return "evaluation service unreachable";
}

// ---------------------------------------------------------------------------
// Presenter: turns state into the exact strings the DOM displays
// ---------------------------------------------------------------------------

export interface SavingsBar {
  unit: string;
  savingsChf: number;
  chfText: string;
  pctText: string;
}

export interface ViewModel {
  scenarioName: string;
  priceText: string;
  cvText: string;
  verdict: string;
  fairPriceText: string;
  bars: SavingsBar[];
  tariffLines: string[];
  banner: string | null;
}

export function presentView(state: NegotiationState): ViewModel | null {
  const { evaluation, sweep, info } = state;
  if (evaluation === null || info === null) return null;
  const bars: SavingsBar[] = Object.entries(evaluation.lec.per_household).map(
    ([unit, econ]) => ({
      unit,
      savingsChf: econ.savings_chf ?? 0,
      chfText: formatChf(econ.savings_chf),
      pctText: formatPct(econ.savings_pct),
    }),
  );
  const tariffs = evaluation.meta.tariffs;
  return {
    scenarioName: evaluation.meta.scenario_name,
    priceText: formatPrice(evaluation.fairness.local_price),
    cvText: formatCv(evaluation.fairness.cv),
    verdict: evaluation.fairness.local_price_verdict,
    fairPriceText:
      sweep === null || sweep.fair_price === null
        ? "undefined"
        : formatPrice(sweep.fair_price),
    bars,
    tariffLines: [
      `retail import ${tariffs.retail_import} CHF/kWh`,
      `feed-in ${tariffs.feed_in} CHF/kWh`,
      `network fee ${tariffs.network_fee} CHF/kWh (reduction γ=${tariffs.gamma})`,
      `levies ${tariffs.levies} CHF/kWh${tariffs.levies_on_local ? " (also on local)" : ""}`,
      `fair band ${formatPrice(info.fair_band.low)} – ${formatPrice(info.fair_band.high)} CHF/kWh`,
    ],
    banner: state.banner,
  };
}
