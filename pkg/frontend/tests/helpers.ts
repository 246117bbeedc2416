/** Fetch fakes backed by the recorded service fixture. */

import fixtureJson from "./fixtures/eval_fixture.json";

export const fixture = fixtureJson as unknown as {
  info: any;
  sweep: any;
  evaluations: Record<string, any>;
  mini: {
    upload: { token: string; name: string; unit_ids: string[] };
    info: any;
    sweep: any;
    evaluate_at_feed_in: any;
    meters_csv: string;
  };
};

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** Routes requests to the recorded responses; unknown routes 404. */
export function fixtureFetch(): typeof fetch {
  const miniToken = fixture.mini.upload.token;
  return async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = new URL(String(input));
    const path = url.pathname;
    if (init?.method === "POST" && path === "/scenarios") {
      const body = JSON.parse(String(init.body));
      if (typeof body.meters_csv !== "string" || body.meters_csv.includes("-0.1")) {
        return jsonResponse(
          { detail: "line 3: unit 'pv' at 2025-01-01T00:15:00Z: negative consumption_kwh (-0.1)" },
          400,
        );
      }
      return jsonResponse(fixture.mini.upload, 201);
    }
    const table1 = path.startsWith("/scenarios/table1");
    const mini = path.startsWith(`/scenarios/${miniToken}`);
    if (!table1 && !mini) return jsonResponse({ detail: "unknown scenario token" }, 404);
    const source = table1
      ? { info: fixture.info, sweep: fixture.sweep }
      : { info: fixture.mini.info, sweep: fixture.mini.sweep };
    if (path.endsWith("/evaluate")) {
      const price = url.searchParams.get("local_price") ?? "";
      const payload = table1
        ? fixture.evaluations[price]
        : price === "0.06"
          ? fixture.mini.evaluate_at_feed_in
          : undefined;
      if (payload === undefined) {
        return jsonResponse({ detail: `no recorded evaluation at ${price}` }, 422);
      }
      return jsonResponse(payload);
    }
    if (path.endsWith("/sweep")) return jsonResponse(source.sweep);
    return jsonResponse(source.info);
  };
}

/** Fetch whose responses resolve only when the test releases them, in any
 * order — used to simulate a slow stale response overtaking a fast one. */
export function deferredFetch(inner: typeof fetch) {
  const pending: Array<{ url: string; release: () => void }> = [];
  const fn: typeof fetch = (input, init) =>
    new Promise<Response>((resolve) => {
      pending.push({
        url: String(input),
        release: () => {
          void inner(input, init).then(resolve);
        },
      });
    });
  return { fetch: fn, pending };
}

export function flushMicrotasks(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
