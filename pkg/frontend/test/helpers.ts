import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { PlanDto, SceneDto, SessionSummary } from "../src/protocol.js";
import { parseLogText } from "../src/protocol.js";

const here = dirname(fileURLToPath(import.meta.url));

export function readFixture(name: string): string {
  return readFileSync(join(here, "..", "fixtures", name), "utf8");
}

export function recordedStream() {
  return parseLogText(readFixture("recorded_stream.jsonl"));
}

export function paperScene(): SceneDto {
  return JSON.parse(readFixture("scene.json")) as SceneDto;
}

export function paperPlan(): PlanDto {
  return JSON.parse(readFixture("plan.json")) as PlanDto;
}

/** Summary the service returns right after creating a session on the fixture scene. */
export function freshSummary(scene: SceneDto): SessionSummary {
  return {
    session_id: "test-session",
    phase: "idle",
    clock: 0.0,
    step: null,
    scene,
    cues: [],
    log_length: 0,
  };
}
