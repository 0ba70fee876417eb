import { describe, expect, it } from "vitest";

import { ServiceClient, ServiceError } from "../src/api.js";
import { triggerEvent } from "../src/controls.js";
import { paperScene, readFixture } from "./helpers.js";

interface Recorded {
  url: string;
  method: string;
  body: string | null;
}

function fakeFetch(responses: Response[]) {
  const calls: Recorded[] = [];
  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? init.body : null,
    });
    const next = responses.shift();
    if (!next) throw new Error("fake fetch exhausted");
    return next;
  };
  return { calls, fetchImpl };
}

function jsonResponse(doc: unknown, status = 200): Response {
  return new Response(JSON.stringify(doc), {
    status,
    headers: { "content-type": "application/json" },
  });
}

const BASE = "http://planner.test:8000";

describe("ServiceClient", () => {
  it("creates sessions by posting the scene document untouched", async () => {
    const scene = paperScene();
    const { calls, fetchImpl } = fakeFetch([
      jsonResponse({ session_id: "s1", phase: "idle", scene, task: "pouring_water" }, 201),
    ]);
    const client = new ServiceClient(BASE, fetchImpl);
    await client.createSession(scene);
    expect(calls[0]!.url).toBe(`${BASE}/sessions`);
    expect(calls[0]!.method).toBe("POST");
    expect(JSON.parse(calls[0]!.body!)).toEqual({ scene });
  });

  it("includes the task only when one is given", async () => {
    const scene = paperScene();
    const { calls, fetchImpl } = fakeFetch([jsonResponse({}, 201), jsonResponse({}, 201)]);
    const client = new ServiceClient(BASE, fetchImpl);
    await client.createSession(scene);
    await client.createSession(scene, "pouring_water");
    expect(JSON.parse(calls[0]!.body!)).not.toHaveProperty("task");
    expect(JSON.parse(calls[1]!.body!)).toMatchObject({ task: "pouring_water" });
  });

  it("reads the summary from the bare session resource", async () => {
    const summary = {
      session_id: "s1",
      phase: "idle",
      clock: 0.0,
      step: null,
      scene: paperScene(),
      cues: [],
      log_length: 0,
    };
    const { calls, fetchImpl } = fakeFetch([jsonResponse(summary)]);
    const client = new ServiceClient(BASE, fetchImpl);
    const got = await client.summary("s1");
    expect(calls[0]!.url).toBe(`${BASE}/sessions/s1`);
    expect(got).toEqual(summary);
  });

  it("serializes events verbatim", async () => {
    const { calls, fetchImpl } = fakeFetch([
      jsonResponse({ status: "applied", phase: "awaiting_robot", clock: 0, step: 1, emissions: [] }),
    ]);
    const client = new ServiceClient(BASE, fetchImpl);
    const event = triggerEvent();
    await client.postEvent("s1", event);
    expect(calls[0]!.url).toBe(`${BASE}/sessions/s1/events`);
    expect(calls[0]!.body).toBe(JSON.stringify(event));
  });

  it("returns ignored events as normal responses, not errors", async () => {
    const body = { status: "ignored", phase: "idle", clock: 0, step: null, emissions: [] };
    const { fetchImpl } = fakeFetch([jsonResponse(body, 409)]);
    const client = new ServiceClient(BASE, fetchImpl);
    const resp = await client.postEvent("s1", { type: "UserStepDone", step_id: 2 });
    expect(resp).toEqual(body);
  });

  it("raises ServiceError with the body for other failures", async () => {
    const { fetchImpl } = fakeFetch([
      jsonResponse({ error: "no feasible arrangement", detail: "glass" }, 409),
    ]);
    const client = new ServiceClient(BASE, fetchImpl);
    try {
      await client.plan("s1");
      expect.unreachable("plan should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(ServiceError);
      expect((err as ServiceError).status).toBe(409);
      expect((err as ServiceError).body).toMatchObject({ error: "no feasible arrangement" });
    }
  });

  it("parses the ndjson log and forwards the cursor", async () => {
    const text = readFixture("recorded_stream.jsonl");
    const { calls, fetchImpl } = fakeFetch([
      new Response(text, { status: 200, headers: { "content-type": "application/x-ndjson" } }),
    ]);
    const client = new ServiceClient(BASE, fetchImpl);
    const entries = await client.log("s1", 3);
    expect(calls[0]!.url).toBe(`${BASE}/sessions/s1/log?after=3`);
    expect(entries).toHaveLength(35);
    expect(entries[0]!.kind).toBe("Event");
  });

  it("lists fixtures and derives the websocket url", async () => {
    const { fetchImpl } = fakeFetch([
      jsonResponse({ fixtures: [{ name: "paper_scenario", scene: {} }] }),
    ]);
    const client = new ServiceClient(BASE, fetchImpl);
    const fixtures = await client.listFixtures();
    expect(fixtures.map((f) => f.name)).toEqual(["paper_scenario"]);
    expect(client.streamUrl("s1")).toBe("ws://planner.test:8000/sessions/s1/stream");
    const secure = new ServiceClient("https://planner.test", fetchImpl);
    expect(secure.streamUrl("s1")).toBe("wss://planner.test/sessions/s1/stream");
  });
});
