/**
 * Wire types for the planner service. Everything here mirrors the JSON the
 * HTTP/WS endpoints emit; nothing is computed client-side.
 */

export const TRIGGER_PHRASE = "Help me to get some water.";

export interface PoseDto {
  x: number;
  y: number;
  yaw: number;
}

export interface ObjectDto {
  id: string;
  kind: string;
  pose: PoseDto;
  grasp_height: number;
  mass: number;
  attached_to: string | null;
}

export interface SceneDto {
  schema_version: number;
  table: { half_extent_x: number; half_extent_y: number; top_height: number };
  objects: ObjectDto[];
  human: { hip_anchor: PoseDto } & Record<string, unknown>;
  impairment: {
    disabled_side: string;
    reach_scale: number;
    max_torso_lean: number;
  };
  robot_workspace: { x_min: number; x_max: number; y_min: number; y_max: number };
}

export interface CueDto {
  kind: "spinning_arrows" | "target_disc" | "comet_trail";
  anchor: string | PoseDto;
  end: PoseDto | null;
  loop_period: number | null;
}

/** One line of the session log / WebSocket stream. */
export interface LogEntry {
  at: number;
  kind: string;
  payload: Record<string, unknown>;
}

export type EngineEvent =
  | { type: "TriggerPhrase"; text: string }
  | { type: "RobotActionDone"; step_id: number }
  | { type: "UserStepDone"; step_id: number }
  | { type: "ObjectMoved"; object_id: string; pose: PoseDto }
  | { type: "Abort" }
  | { type: "Tick"; dt: number };

/** Body of the 201 response to POST /sessions; slimmer than a summary. */
export interface CreatedSession {
  session_id: string;
  phase: string;
  scene: SceneDto;
  task: string;
}

export interface SessionSummary {
  session_id: string;
  phase: string;
  clock: number;
  step: number | null;
  scene: SceneDto;
  cues: { cue: CueDto; on_at: number; phase: number }[];
  log_length: number;
}

export interface EventResponse {
  status: "applied" | "ignored";
  phase: string;
  clock: number;
  step: number | null;
  emissions: LogEntry[];
}

export interface PlanDto {
  task: string;
  arrangement: {
    glass_target: PoseDto;
    bottle_hold: { r: number; z: number };
    cap_drop_zone: PoseDto;
  };
  baseline: (number | { infeasible: string })[];
  assisted_cost: number[];
  step_actors: string[];
  interventions: string[];
  items: {
    step_id: number;
    actor: string;
    action: unknown;
    speech: string | null;
    cues: CueDto[];
    completion_event: string;
  }[];
}

export function parseLogLine(line: string): LogEntry {
  const doc = JSON.parse(line) as LogEntry;
  if (typeof doc.at !== "number" || typeof doc.kind !== "string") {
    throw new Error(`not a log entry: ${line}`);
  }
  return doc;
}

export function parseLogText(text: string): LogEntry[] {
  return text
    .split("\n")
    .map((l) => l.trim())
    .filter((l) => l.length > 0)
    .map(parseLogLine);
}
