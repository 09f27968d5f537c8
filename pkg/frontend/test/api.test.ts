import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function response(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("returns parsed payloads on success", async () => {
    const fetchFn = vi.fn(async () => response(200, { robot: [], pixels: [] }));
    const api = new ApiClient("http://x", fetchFn);
    expect(await api.getPlan()).toEqual({ robot: [], pixels: [] });
    expect(fetchFn).toHaveBeenCalledWith("http://x/plan", undefined);
  });

  it("posts markers as JSON", async () => {
    const fetchFn = vi.fn(async () => response(200, { ok: true }));
    const api = new ApiClient("", fetchFn);
    await api.postMarkers([
      [1, 2],
      [3, 4],
    ]);
    const [, init] = fetchFn.mock.calls[0] as [string, RequestInit];
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual({ markers: [[1, 2], [3, 4]] });
  });

  it("raises ApiError carrying the service reason", async () => {
    const fetchFn = vi.fn(async () =>
      response(422, { error: "exactly 2 markers required" }),
    );
    const api = new ApiClient("", fetchFn);
    const err = await api.postMarkers([[1, 2]] as never).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.message).toContain("exactly 2 markers");
  });

  it("tolerates non-JSON error bodies", async () => {
    const fetchFn = vi.fn(async () => new Response("boom", { status: 500 }));
    const api = new ApiClient("", fetchFn);
    const err = await api.getScene().catch((e) => e);
    expect(err.status).toBe(500);
    expect(err.message).toBe("boom");
  });
});
