/** Thin HTTP client for the planner service. */

import type {
  CreatedSession,
  EngineEvent,
  EventResponse,
  LogEntry,
  PlanDto,
  SceneDto,
  SessionSummary,
} from "./protocol.js";
import { parseLogText } from "./protocol.js";

export interface FixtureListing {
  name: string;
  scene: SceneDto;
}

export class ServiceError extends Error {
  constructor(
    public status: number,
    public body: unknown,
  ) {
    super(`service returned ${status}`);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private base: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    return this.fetchImpl(`${this.base}${path}`, init);
  }

  private async json<T>(resp: Response): Promise<T> {
    if (!resp.ok) {
      let body: unknown = null;
      try {
        body = await resp.json();
      } catch {
        body = null;
      }
      throw new ServiceError(resp.status, body);
    }
    return (await resp.json()) as T;
  }

  async listFixtures(): Promise<FixtureListing[]> {
    const resp = await this.request("/fixtures");
    const doc = await this.json<{ fixtures: FixtureListing[] }>(resp);
    return doc.fixtures;
  }

  async createSession(scene: SceneDto, task?: string): Promise<CreatedSession> {
    const body: Record<string, unknown> = { scene };
    if (task !== undefined) body["task"] = task;
    const resp = await this.request("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return this.json<CreatedSession>(resp);
  }

  async summary(sessionId: string): Promise<SessionSummary> {
    const resp = await this.request(`/sessions/${sessionId}`);
    return this.json<SessionSummary>(resp);
  }

  async plan(sessionId: string): Promise<PlanDto> {
    const resp = await this.request(`/sessions/${sessionId}/plan`);
    return this.json<PlanDto>(resp);
  }

  /**
   * Post one event. Ignored events come back as HTTP 409 with the same body
   * shape, so a 409 is surfaced as a normal response rather than an error.
   */
  async postEvent(sessionId: string, event: EngineEvent): Promise<EventResponse> {
    const resp = await this.request(`/sessions/${sessionId}/events`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(event),
    });
    if (resp.status === 409) {
      return (await resp.json()) as EventResponse;
    }
    return this.json<EventResponse>(resp);
  }

  async log(sessionId: string, after = 0): Promise<LogEntry[]> {
    const resp = await this.request(`/sessions/${sessionId}/log?after=${after}`);
    if (!resp.ok) {
      throw new ServiceError(resp.status, null);
    }
    return parseLogText(await resp.text());
  }

  /** ws:// URL for the session's live log stream. */
  streamUrl(sessionId: string): string {
    return `${this.base.replace(/^http/, "ws")}/sessions/${sessionId}/stream`;
  }
}
