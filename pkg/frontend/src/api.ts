// Thin HTTP wrappers over the documented endpoints, plus the idempotent
// submit guard: one in-flight instruction per console, no double sends.

import type { SceneSnapshot } from "./types.js";

export interface EpisodeResponse {
  episode_id: number;
  status?: string;
  label?: "FAST" | "SLOW";
  success?: boolean;
}

export class BusyError extends Error {}

export class ApiClient {
  private submitting = false;

  constructor(
    public baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async post(path: string, body: unknown): Promise<Response> {
    return this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async createSession(runMode: "auto" | "step"): Promise<string> {
    const resp = await this.post("/v1/sessions", { run_mode: runMode });
    if (!resp.ok) throw new Error(`create session: ${resp.status}`);
    return (await resp.json()).id as string;
  }

  async reset(
    sessionId: string,
    seed: number,
    family: string,
  ): Promise<{ instruction_hint: string; scene: SceneSnapshot }> {
    const resp = await this.post(`/v1/sessions/${sessionId}/reset`, { seed, family });
    if (!resp.ok) throw new Error(`reset: ${resp.status} ${await resp.text()}`);
    return resp.json();
  }

  /** Submit an instruction. Re-entrant calls while one is in flight are
   * rejected locally (idempotent submit guard); a server 409 surfaces as
   * BusyError for the busy notice. */
  async submitInstruction(sessionId: string, text: string): Promise<EpisodeResponse> {
    if (this.submitting) {
      throw new BusyError("an instruction is already in flight");
    }
    this.submitting = true;
    try {
      const resp = await this.post(`/v1/sessions/${sessionId}/instruction`, { text });
      if (resp.status === 409) {
        throw new BusyError(await resp.text());
      }
      if (!resp.ok) {
        throw new Error(`instruction: ${resp.status} ${await resp.text()}`);
      }
      return (await resp.json()) as EpisodeResponse;
    } finally {
      this.submitting = false;
    }
  }

  get inFlight(): boolean {
    return this.submitting;
  }

  async releaseStep(sessionId: string): Promise<void> {
    const resp = await this.post(`/v1/sessions/${sessionId}/step`, {});
    if (!resp.ok) throw new Error(`step: ${resp.status}`);
  }

  async getEpisode(sessionId: string, n: number): Promise<Record<string, unknown>> {
    const resp = await this.fetchImpl(`${this.baseUrl}/v1/sessions/${sessionId}/episodes/${n}`);
    if (!resp.ok) throw new Error(`episode ${n}: ${resp.status}`);
    return resp.json();
  }

  async classify(text: string): Promise<{ label: string; neighbors: unknown[] }> {
    const resp = await this.fetchImpl(
      `${this.baseUrl}/v1/bank/classify?text=${encodeURIComponent(text)}`,
    );
    if (!resp.ok) throw new Error(`classify: ${resp.status}`);
    return resp.json();
  }
}
