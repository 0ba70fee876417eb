/**
 * Button wiring for the operator panel. Which buttons are live depends only
 * on the phase and step the service last reported; the service remains the
 * judge and will 409 anything posted out of turn, this gating is just to
 * keep the panel honest.
 */

import type { EngineEvent, PoseDto } from "./protocol.js";
import { TRIGGER_PHRASE } from "./protocol.js";

export interface ControlState {
  id: string;
  label: string;
  enabled: boolean;
  event: EngineEvent;
}

export function triggerEvent(): EngineEvent {
  return { type: "TriggerPhrase", text: TRIGGER_PHRASE };
}

export function userStepDone(stepId: number): EngineEvent {
  return { type: "UserStepDone", step_id: stepId };
}

export function objectMovedEvent(objectId: string, x: number, y: number): EngineEvent {
  const pose: PoseDto = { x, y, yaw: 0.0 };
  return { type: "ObjectMoved", object_id: objectId, pose };
}

export function tickEvent(dt: number): EngineEvent {
  return { type: "Tick", dt };
}

export function abortEvent(): EngineEvent {
  return { type: "Abort" };
}

const HUMAN_STEP_BUTTONS: { step: number; id: string; label: string }[] = [
  { step: 2, id: "cap-removed", label: "Cap removed" },
  { step: 3, id: "cap-placed", label: "Cap placed on table" },
  { step: 4, id: "poured", label: "Water poured" },
  { step: 5, id: "glass-picked", label: "Glass picked up" },
];

export function controlPanel(phase: string, step: number | null): ControlState[] {
  const controls: ControlState[] = [
    {
      id: "trigger",
      label: `Say: "${TRIGGER_PHRASE}"`,
      enabled: phase === "idle",
      event: triggerEvent(),
    },
  ];
  for (const b of HUMAN_STEP_BUTTONS) {
    controls.push({
      id: b.id,
      label: b.label,
      enabled: phase === "awaiting_human" && step === b.step,
      event: userStepDone(b.step),
    });
  }
  controls.push({
    id: "abort",
    label: "Abort",
    enabled: phase === "awaiting_robot" || phase === "awaiting_human",
    event: abortEvent(),
  });
  return controls;
}
