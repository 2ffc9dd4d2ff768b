// SSE wire parsing and a reconnecting client over fetch streams.
//
// fetch + ReadableStream instead of EventSource so the same code runs in
// the browser and under Node for tests; the server replays a session's
// full event log on connect, and the reducer's monotone cursor makes the
// replay idempotent across reconnects.

import { coerceEvent } from "./state.js";
import type { ConsoleEvent } from "./types.js";

interface RawFrame {
  id: number;
  event: string;
  data: string;
}

/** Incremental parser for the SSE wire format (id/event/data framing). */
export class SseParser {
  private buffer = "";
  private current: Partial<RawFrame> = {};

  push(chunk: string): RawFrame[] {
    this.buffer += chunk;
    const frames: RawFrame[] = [];
    let index;
    while ((index = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, index).replace(/\r$/, "");
      this.buffer = this.buffer.slice(index + 1);
      if (line === "") {
        if (this.current.event !== undefined && this.current.data !== undefined) {
          frames.push({
            id: this.current.id ?? 0,
            event: this.current.event,
            data: this.current.data,
          });
        }
        this.current = {};
      } else if (line.startsWith("id: ")) {
        this.current.id = Number(line.slice(4));
      } else if (line.startsWith("event: ")) {
        this.current.event = line.slice(7);
      } else if (line.startsWith("data: ")) {
        this.current.data = (this.current.data ?? "") + line.slice(6);
      }
      // comment lines (":") and unknown fields are ignored per the SSE spec
    }
    return frames;
  }
}

export function parseFrame(frame: RawFrame): ConsoleEvent | null {
  let payload: unknown;
  try {
    payload = JSON.parse(frame.data);
  } catch {
    return null;
  }
  return coerceEvent(frame.event, frame.id, payload);
}

export interface StreamHandle {
  close(): void;
}

export interface StreamCallbacks {
  onEvent(event: ConsoleEvent): void;
  onMalformed?(detail: string): void;
  onStatus?(status: "connected" | "reconnecting" | "closed"): void;
}

/** Consume a session's event stream, reconnecting with backoff. */
export function openStream(
  baseUrl: string,
  sessionId: string,
  callbacks: StreamCallbacks,
  fetchImpl: typeof fetch = fetch,
): StreamHandle {
  let closed = false;
  let controller = new AbortController();

  async function pump(): Promise<void> {
    let backoffMs = 250;
    while (!closed) {
      controller = new AbortController();
      try {
        const response = await fetchImpl(`${baseUrl}/v1/sessions/${sessionId}/stream`, {
          signal: controller.signal,
        });
        if (!response.ok || response.body === null) {
          throw new Error(`stream status ${response.status}`);
        }
        callbacks.onStatus?.("connected");
        backoffMs = 250;
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        const parser = new SseParser();
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          for (const frame of parser.push(decoder.decode(value, { stream: true }))) {
            const event = parseFrame(frame);
            if (event === null) {
              callbacks.onMalformed?.(`unparseable ${frame.event} event (seq ${frame.id})`);
            } else {
              callbacks.onEvent(event);
            }
          }
        }
      } catch (err) {
        if (closed) return;
      }
      if (closed) return;
      callbacks.onStatus?.("reconnecting");
      await new Promise((resolve) => setTimeout(resolve, backoffMs));
      backoffMs = Math.min(backoffMs * 2, 5000);
    }
  }

  void pump();
  return {
    close() {
      closed = true;
      controller.abort();
      callbacks.onStatus?.("closed");
    },
  };
}
