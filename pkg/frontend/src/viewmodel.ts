/**
 * Client-side session state. This module only folds what the service sends;
 * phases, steps, clocks, and costs are taken verbatim from responses and log
 * entries, never recomputed here.
 */

import type {
  CueDto,
  EventResponse,
  LogEntry,
  PlanDto,
  SceneDto,
  SessionSummary,
} from "./protocol.js";

export interface ActiveCue {
  cue: CueDto;
  onAt: number;
}

export interface ViewModel {
  sessionId: string | null;
  phase: string;
  step: number | null;
  clock: number;
  scene: SceneDto | null;
  cues: ActiveCue[];
  speech: string | null;
  done: boolean;
  logLength: number;
}

export function initialViewModel(): ViewModel {
  return {
    sessionId: null,
    phase: "idle",
    step: null,
    clock: 0,
    scene: null,
    cues: [],
    speech: null,
    done: false,
    logLength: 0,
  };
}

export function applySummary(vm: ViewModel, summary: SessionSummary): ViewModel {
  return {
    ...vm,
    sessionId: summary.session_id,
    phase: summary.phase,
    step: summary.step,
    clock: summary.clock,
    scene: summary.scene,
    cues: summary.cues.map((c) => ({ cue: c.cue, onAt: c.on_at })),
    logLength: summary.log_length,
  };
}

function sameCue(a: CueDto, b: CueDto): boolean {
  return JSON.stringify(a) === JSON.stringify(b);
}

/** Fold one log entry into the view. Pure; returns a new model. */
export function applyEntry(vm: ViewModel, entry: LogEntry): ViewModel {
  const next: ViewModel = { ...vm, clock: entry.at, logLength: vm.logLength + 1 };
  const payload = entry.payload;
  switch (entry.kind) {
    case "Speech":
      next.speech = payload["text"] as string;
      break;
    case "CueOn":
      next.cues = [...vm.cues, { cue: payload["cue"] as CueDto, onAt: entry.at }];
      break;
    case "CueOff": {
      const off = payload["cues"] as CueDto[];
      next.cues = vm.cues.filter((ac) => !off.some((c) => sameCue(c, ac.cue)));
      break;
    }
    case "SceneChanged": {
      if (vm.scene) {
        const id = payload["object"] as string;
        const pose = payload["pose"] as { x: number; y: number; yaw: number };
        const attached = payload["attached_to"] as string | null;
        next.scene = {
          ...vm.scene,
          objects: vm.scene.objects.map((o) =>
            o.id === id ? { ...o, pose, attached_to: attached } : o,
          ),
        };
      }
      break;
    }
    case "TaskComplete":
      next.done = true;
      break;
    default:
      break;
  }
  return next;
}

export function applyEntries(vm: ViewModel, entries: LogEntry[]): ViewModel {
  return entries.reduce(applyEntry, vm);
}

/** Fold a POST /events response: status fields verbatim, then its emissions. */
export function applyEventResponse(vm: ViewModel, resp: EventResponse): ViewModel {
  const folded = applyEntries(vm, resp.emissions);
  return { ...folded, phase: resp.phase, step: resp.step, clock: resp.clock };
}

export interface CostBar {
  stepId: number;
  actor: string;
  baselineLabel: string;
  assistedLabel: string;
  baseline: number | null;
  assisted: number;
}

/**
 * Rows for the effort chart. Labels are the service's numbers stringified
 * as-is so the panel can be checked against the plan document byte for byte.
 */
export function costBars(plan: PlanDto): CostBar[] {
  return plan.baseline.map((raw, i) => {
    const infeasible = typeof raw === "object" && raw !== null;
    return {
      stepId: i + 1,
      actor: plan.step_actors[i] ?? "",
      baselineLabel: infeasible
        ? `infeasible (${(raw as { infeasible: string }).infeasible})`
        : String(raw),
      assistedLabel: String(plan.assisted_cost[i]),
      baseline: infeasible ? null : (raw as number),
      assisted: plan.assisted_cost[i] ?? 0,
    };
  });
}
