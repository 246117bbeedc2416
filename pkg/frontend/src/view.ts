/**
 * Thin DOM layer: renders the presenter output and the sweep curve.
 * No numbers are computed here beyond pixel coordinates.
 */

import { SweepResponse } from "./api.js";
import { NegotiationState, ViewModel, presentView } from "./store.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node;
}

export function render(state: NegotiationState): void {
  const banner = el("banner");
  if (state.banner !== null) {
    banner.textContent = state.banner;
    banner.classList.remove("hidden");
  } else {
    banner.classList.add("hidden");
  }

  const vm = presentView(state);
  if (vm === null) return; // keep the last good view

  el("scenario-name").textContent = vm.scenarioName;
  el("current-price").textContent = `${vm.priceText} CHF/kWh`;
  el("cv-value").textContent = vm.cvText;
  el("fair-price").textContent = `${vm.fairPriceText} CHF/kWh`;

  const badge = el("verdict-badge");
  badge.textContent = vm.verdict.replaceAll("_", " ");
  badge.className = `badge ${vm.verdict}`;

  renderBars(vm);
  renderTariffs(vm);
  if (state.sweep !== null) {
    renderCurve(state.sweep, state.currentPrice);
  }
}

function renderBars(vm: ViewModel): void {
  const container = el("savings-bars");
  container.replaceChildren();
  const maxAbs = Math.max(1e-9, ...vm.bars.map((b) => Math.abs(b.savingsChf)));
  for (const bar of vm.bars) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const label = document.createElement("span");
    label.className = "bar-label";
    label.textContent = `unit ${bar.unit}`;
    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = `bar-fill ${bar.savingsChf < 0 ? "negative" : ""}`;
    fill.style.width = `${(Math.abs(bar.savingsChf) / maxAbs) * 100}%`;
    track.appendChild(fill);
    const value = document.createElement("span");
    value.className = "bar-value";
    value.textContent = `${bar.chfText} CHF (${bar.pctText})`;
    row.append(label, track, value);
    container.appendChild(row);
  }
}

function renderTariffs(vm: ViewModel): void {
  const list = el("tariff-panel");
  list.replaceChildren();
  for (const line of vm.tariffLines) {
    const item = document.createElement("li");
    item.textContent = line;
    list.appendChild(item);
  }
}

/** Sweep curve: CV over price with the fairest price and the current
 * slider position marked. The slider snaps to the sweep grid, so the
 * current marker always sits on a computed point. */
function renderCurve(sweep: SweepResponse, currentPrice: number | null): void {
  const svg = el("sweep-curve") as unknown as SVGSVGElement;
  while (svg.firstChild) svg.removeChild(svg.firstChild);
  const width = 560;
  const height = 220;
  const margin = { left: 48, right: 16, top: 12, bottom: 30 };

  const defined = sweep.per_price.filter((p) => p.cv !== null);
  if (defined.length === 0) {
    const note = document.createElementNS(SVG_NS, "text");
    note.setAttribute("x", String(width / 2));
    note.setAttribute("y", String(height / 2));
    note.setAttribute("text-anchor", "middle");
    note.textContent = "CV undefined for this scenario";
    svg.appendChild(note);
    return;
  }

  const prices = sweep.price_grid;
  const pMin = prices[0];
  const pMax = prices[prices.length - 1];
  const cvs = defined.map((p) => p.cv as number);
  const cvMax = Math.max(...cvs);
  const cvMin = 0;

  const x = (p: number) =>
    margin.left + ((p - pMin) / (pMax - pMin || 1)) * (width - margin.left - margin.right);
  const y = (cv: number) =>
    height - margin.bottom - ((cv - cvMin) / (cvMax - cvMin || 1)) * (height - margin.top - margin.bottom);

  const path = document.createElementNS(SVG_NS, "path");
  path.setAttribute(
    "d",
    defined
      .map((p, i) => `${i === 0 ? "M" : "L"} ${x(p.local_price)} ${y(p.cv as number)}`)
      .join(" "),
  );
  path.setAttribute("class", "curve");
  svg.appendChild(path);

  for (const p of defined) {
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(x(p.local_price)));
    dot.setAttribute("cy", String(y(p.cv as number)));
    dot.setAttribute("r", "3");
    dot.setAttribute("class", "curve-dot");
    svg.appendChild(dot);
  }

  if (sweep.fair_price !== null) {
    const marker = document.createElementNS(SVG_NS, "line");
    marker.setAttribute("x1", String(x(sweep.fair_price)));
    marker.setAttribute("x2", String(x(sweep.fair_price)));
    marker.setAttribute("y1", String(margin.top));
    marker.setAttribute("y2", String(height - margin.bottom));
    marker.setAttribute("class", "fair-marker");
    svg.appendChild(marker);
  }
  if (currentPrice !== null && currentPrice >= pMin && currentPrice <= pMax) {
    const marker = document.createElementNS(SVG_NS, "line");
    marker.setAttribute("x1", String(x(currentPrice)));
    marker.setAttribute("x2", String(x(currentPrice)));
    marker.setAttribute("y1", String(margin.top));
    marker.setAttribute("y2", String(height - margin.bottom));
    marker.setAttribute("class", "current-marker");
    svg.appendChild(marker);
  }

  for (const p of [pMin, pMax]) {
    const tick = document.createElementNS(SVG_NS, "text");
    tick.setAttribute("x", String(x(p)));
    tick.setAttribute("y", String(height - 8));
    tick.setAttribute("text-anchor", "middle");
    tick.setAttribute("class", "tick");
    tick.textContent = p.toFixed(3);
    svg.appendChild(tick);
  }
  const axis = document.createElementNS(SVG_NS, "text");
  axis.setAttribute("x", "8");
  axis.setAttribute("y", String(margin.top + 10));
  axis.setAttribute("class", "tick");
  axis.textContent = "CV";
  svg.appendChild(axis);
}
