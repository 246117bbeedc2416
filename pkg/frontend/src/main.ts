/**
 * Dashboard wiring: slider on the sweep grid, gamma selector, file upload.
 *
 * The slider step mirrors the sweep grid so the current-price marker always
 * lies on a computed curve point; the free-form price box triggers a
 * single-point evaluation for finer exploration.
 */

import { ApiClient } from "./api.js";
import { debounce } from "./debounce.js";
import { NegotiationStore } from "./store.js";
import { render } from "./view.js";

const DEBOUNCE_MS = 150;

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? "http://127.0.0.1:8000";
}

function input(id: string): HTMLInputElement {
  return document.getElementById(id) as HTMLInputElement;
}

async function start(): Promise<void> {
  const store = new NegotiationStore(new ApiClient(apiBase()));
  const slider = input("price-slider");
  const priceBox = input("price-box");
  const gammaSelect = document.getElementById("gamma-select") as HTMLSelectElement;

  store.subscribe((state) => {
    render(state);
    if (state.sweep !== null) {
      const grid = state.sweep.price_grid;
      slider.min = String(grid[0]);
      slider.max = String(grid[grid.length - 1]);
      slider.step = String(grid.length > 1 ? grid[1] - grid[0] : 0.005);
    }
    if (state.currentPrice !== null && document.activeElement !== priceBox) {
      slider.value = String(state.currentPrice);
      priceBox.value = String(state.currentPrice);
    }
  });

  const requestPrice = debounce((price: number) => {
    void store.onPriceChange(price);
  }, DEBOUNCE_MS);

  slider.addEventListener("input", () => requestPrice(Number(slider.value)));
  priceBox.addEventListener("change", () => {
    const price = Number(priceBox.value);
    if (Number.isFinite(price) && price >= 0) requestPrice(price);
  });
  gammaSelect.addEventListener("change", () => {
    void store.onGammaChange(Number(gammaSelect.value));
  });

  document.getElementById("upload-form")!.addEventListener("submit", async (event) => {
    event.preventDefault();
    const metersFile = input("meters-file").files?.[0];
    const tariffsFile = input("tariffs-file").files?.[0];
    const metersText = metersFile === undefined ? "" : await metersFile.text();
    const tariffsText = tariffsFile === undefined ? "" : await tariffsFile.text();
    const name = metersFile?.name.replace(/\.csv$/i, "") ?? "uploaded";
    await store.loadScenarioFile(metersText, tariffsText, name);
  });

  await store.selectScenario("table1");
}

window.addEventListener("DOMContentLoaded", () => {
  void start();
});
