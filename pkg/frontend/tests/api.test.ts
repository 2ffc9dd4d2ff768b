// HTTP client wrappers: submit guard and busy handling.

import { describe, expect, it } from "vitest";

import { ApiClient, BusyError } from "../src/api.js";

function fetchStub(handler: (url: string, init?: RequestInit) => Promise<Response>): typeof fetch {
  return ((url: string, init?: RequestInit) => handler(url, init)) as unknown as typeof fetch;
}

describe("ApiClient", () => {
  it("sends an instruction exactly once per submit", async () => {
    let calls = 0;
    let release: () => void = () => {};
    const gate = new Promise<void>((resolve) => (release = resolve));
    const api = new ApiClient(
      "http://s",
      fetchStub(async (url) => {
        if (url.endsWith("/instruction")) {
          calls += 1;
          await gate;
          return new Response(JSON.stringify({ episode_id: 0 }), { status: 200 });
        }
        throw new Error(`unexpected ${url}`);
      }),
    );
    const first = api.submitInstruction("sid", "pick up the red cube");
    await expect(api.submitInstruction("sid", "pick up the red cube")).rejects.toBeInstanceOf(
      BusyError,
    );
    release();
    await first;
    expect(calls).toBe(1);
  });

  it("maps a server 409 to BusyError", async () => {
    const api = new ApiClient(
      "http://s",
      fetchStub(async () => new Response("busy", { status: 409 })),
    );
    await expect(api.submitInstruction("sid", "x")).rejects.toBeInstanceOf(BusyError);
    expect(api.inFlight).toBe(false); // guard released for retry
  });

  it("surfaces transport failures and stays retryable", async () => {
    let attempt = 0;
    const api = new ApiClient(
      "http://s",
      fetchStub(async () => {
        attempt += 1;
        if (attempt === 1) throw new Error("connection refused");
        return new Response(JSON.stringify({ episode_id: 1 }), { status: 200 });
      }),
    );
    await expect(api.submitInstruction("sid", "x")).rejects.toThrow("connection refused");
    const result = await api.submitInstruction("sid", "x");
    expect(result.episode_id).toBe(1);
  });
});
