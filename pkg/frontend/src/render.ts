/**
 * Tabletop drawing. Scene and cue geometry is produced as a plain list of
 * draw ops in world coordinates (metres, table frame) so it can be unit
 * tested without a canvas; paint() maps the ops onto a 2D context.
 */

import type { CueDto, PoseDto, SceneDto } from "./protocol.js";
import type { ActiveCue, ViewModel } from "./viewmodel.js";

export type DrawOp =
  | { op: "rect"; x: number; y: number; w: number; h: number; style: string; fill: boolean }
  | { op: "circle"; x: number; y: number; r: number; style: string; fill: boolean; label?: string }
  | { op: "line"; x1: number; y1: number; x2: number; y2: number; style: string; width?: number }
  | { op: "arrow"; x: number; y: number; angle: number; length: number; style: string }
  | { op: "disc"; x: number; y: number; r: number; style: string }
  | { op: "comet"; x: number; y: number; trail: { x: number; y: number }[]; style: string };

/** Subset of CanvasRenderingContext2D the painter touches. */
export interface Canvas2DLike {
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  rect(x: number, y: number, w: number, h: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
}

const ARROW_ANGULAR_VELOCITY = Math.PI;

/**
 * Animation phase for a cue at a given wall clock, matching what the service
 * reports in session summaries: comets cycle over their loop period, arrow
 * pairs spin at a fixed angular rate, discs hold still.
 */
export function cuePhase(
  kind: CueDto["kind"],
  onAt: number,
  clock: number,
  loopPeriod: number | null,
): number {
  const elapsed = clock - onAt;
  if (kind === "comet_trail" && loopPeriod !== null && loopPeriod > 0) {
    return (elapsed / loopPeriod) % 1.0;
  }
  if (kind === "spinning_arrows") {
    return (ARROW_ANGULAR_VELOCITY * elapsed) % (2 * Math.PI);
  }
  return 0.0;
}

function resolveAnchor(anchor: string | PoseDto, scene: SceneDto | null): PoseDto | null {
  if (typeof anchor !== "string") return anchor;
  if (!scene) return null;
  const obj = scene.objects.find((o) => o.id === anchor);
  if (!obj) return null;
  return { x: obj.pose.x, y: obj.pose.y, yaw: obj.pose.yaw ?? 0 };
}

const OBJECT_RADIUS: Record<string, number> = {
  bottle: 0.035,
  glass: 0.04,
  cap: 0.015,
};

const OBJECT_STYLE: Record<string, string> = {
  bottle: "#2d7dd2",
  glass: "#97cc04",
  cap: "#f45d01",
};

export function renderScene(scene: SceneDto): DrawOp[] {
  const ops: DrawOp[] = [];
  const t = scene.table;
  ops.push({
    op: "rect",
    x: -t.half_extent_x,
    y: -t.half_extent_y,
    w: 2 * t.half_extent_x,
    h: 2 * t.half_extent_y,
    style: "#8a6d3b",
    fill: true,
  });
  const ws = scene.robot_workspace;
  ops.push({
    op: "rect",
    x: ws.x_min,
    y: ws.y_min,
    w: ws.x_max - ws.x_min,
    h: ws.y_max - ws.y_min,
    style: "#5555ff",
    fill: false,
  });
  const hip = scene.human.hip_anchor;
  ops.push({ op: "circle", x: hip.x, y: hip.y, r: 0.06, style: "#444", fill: true, label: "hip" });
  ops.push({
    op: "arrow",
    x: hip.x,
    y: hip.y,
    angle: hip.yaw,
    length: 0.1,
    style: "#444",
  });
  for (const obj of scene.objects) {
    ops.push({
      op: "circle",
      x: obj.pose.x,
      y: obj.pose.y,
      r: OBJECT_RADIUS[obj.kind] ?? 0.03,
      style: OBJECT_STYLE[obj.kind] ?? "#999",
      fill: true,
      label: obj.id,
    });
  }
  return ops;
}

const CUE_STYLE = "#e0b000";
const ARROW_ORBIT_RADIUS = 0.07;
const ARROW_LENGTH = 0.05;
const DISC_RADIUS = 0.055;
const COMET_TRAIL_STEPS = 6;
const COMET_TRAIL_SPAN = 0.25;

function lerp(a: PoseDto, b: PoseDto, t: number): { x: number; y: number } {
  return { x: a.x + (b.x - a.x) * t, y: a.y + (b.y - a.y) * t };
}

export function renderCue(
  active: ActiveCue,
  clock: number,
  scene: SceneDto | null,
): DrawOp[] {
  const cue = active.cue;
  const anchor = resolveAnchor(cue.anchor, scene);
  if (!anchor) return [];
  const phase = cuePhase(cue.kind, active.onAt, clock, cue.loop_period);
  switch (cue.kind) {
    case "spinning_arrows": {
      const ops: DrawOp[] = [];
      for (const offset of [0, Math.PI]) {
        const a = phase + offset;
        ops.push({
          op: "arrow",
          x: anchor.x + ARROW_ORBIT_RADIUS * Math.cos(a),
          y: anchor.y + ARROW_ORBIT_RADIUS * Math.sin(a),
          angle: a + Math.PI / 2,
          length: ARROW_LENGTH,
          style: CUE_STYLE,
        });
      }
      return ops;
    }
    case "target_disc":
      return [{ op: "disc", x: anchor.x, y: anchor.y, r: DISC_RADIUS, style: CUE_STYLE }];
    case "comet_trail": {
      if (!cue.end) return [];
      const head = lerp(anchor, cue.end, phase);
      const trail: { x: number; y: number }[] = [];
      for (let i = 1; i <= COMET_TRAIL_STEPS; i++) {
        let t = phase - (COMET_TRAIL_SPAN * i) / COMET_TRAIL_STEPS;
        if (t < 0) t += 1.0;
        trail.push(lerp(anchor, cue.end, t));
      }
      return [{ op: "comet", x: head.x, y: head.y, trail, style: CUE_STYLE }];
    }
    default:
      return [];
  }
}

export function renderCues(vm: ViewModel, clock: number): DrawOp[] {
  return vm.cues.flatMap((ac) => renderCue(ac, clock, vm.scene));
}

export interface WorldTransform {
  scale: number;
  cx: number;
  cy: number;
}

function toPixel(t: WorldTransform, x: number, y: number): { px: number; py: number } {
  return { px: t.cx + x * t.scale, py: t.cy - y * t.scale };
}

export function paint(ctx: Canvas2DLike, ops: DrawOp[], t: WorldTransform): void {
  for (const op of ops) {
    ctx.globalAlpha = 1;
    ctx.lineWidth = 1.5;
    switch (op.op) {
      case "rect": {
        const a = toPixel(t, op.x, op.y + op.h);
        ctx.beginPath();
        ctx.rect(a.px, a.py, op.w * t.scale, op.h * t.scale);
        if (op.fill) {
          ctx.fillStyle = op.style;
          ctx.globalAlpha = 0.25;
          ctx.fill();
          ctx.globalAlpha = 1;
        }
        ctx.strokeStyle = op.style;
        ctx.stroke();
        break;
      }
      case "circle": {
        const c = toPixel(t, op.x, op.y);
        ctx.beginPath();
        ctx.arc(c.px, c.py, op.r * t.scale, 0, 2 * Math.PI);
        if (op.fill) {
          ctx.fillStyle = op.style;
          ctx.fill();
        } else {
          ctx.strokeStyle = op.style;
          ctx.stroke();
        }
        if (op.label) {
          ctx.fillStyle = "#222";
          ctx.fillText(op.label, c.px + op.r * t.scale + 2, c.py);
        }
        break;
      }
      case "line": {
        const a = toPixel(t, op.x1, op.y1);
        const b = toPixel(t, op.x2, op.y2);
        ctx.beginPath();
        ctx.moveTo(a.px, a.py);
        ctx.lineTo(b.px, b.py);
        ctx.strokeStyle = op.style;
        if (op.width) ctx.lineWidth = op.width;
        ctx.stroke();
        break;
      }
      case "arrow": {
        const tail = toPixel(t, op.x, op.y);
        const hx = op.x + op.length * Math.cos(op.angle);
        const hy = op.y + op.length * Math.sin(op.angle);
        const head = toPixel(t, hx, hy);
        ctx.beginPath();
        ctx.moveTo(tail.px, tail.py);
        ctx.lineTo(head.px, head.py);
        ctx.strokeStyle = op.style;
        ctx.stroke();
        for (const wing of [0.75 * Math.PI, -0.75 * Math.PI]) {
          const wx = hx + 0.4 * op.length * Math.cos(op.angle + wing);
          const wy = hy + 0.4 * op.length * Math.sin(op.angle + wing);
          const w = toPixel(t, wx, wy);
          ctx.beginPath();
          ctx.moveTo(head.px, head.py);
          ctx.lineTo(w.px, w.py);
          ctx.stroke();
        }
        break;
      }
      case "disc": {
        const c = toPixel(t, op.x, op.y);
        ctx.beginPath();
        ctx.arc(c.px, c.py, op.r * t.scale, 0, 2 * Math.PI);
        ctx.fillStyle = op.style;
        ctx.globalAlpha = 0.35;
        ctx.fill();
        ctx.globalAlpha = 1;
        ctx.strokeStyle = op.style;
        ctx.stroke();
        break;
      }
      case "comet": {
        op.trail.forEach((p, i) => {
          const c = toPixel(t, p.x, p.y);
          ctx.beginPath();
          ctx.arc(c.px, c.py, 3.5 * (1 - i / (op.trail.length + 1)), 0, 2 * Math.PI);
          ctx.fillStyle = op.style;
          ctx.globalAlpha = 0.5 * (1 - i / (op.trail.length + 1));
          ctx.fill();
        });
        ctx.globalAlpha = 1;
        const h = toPixel(t, op.x, op.y);
        ctx.beginPath();
        ctx.arc(h.px, h.py, 5, 0, 2 * Math.PI);
        ctx.fillStyle = op.style;
        ctx.fill();
        break;
      }
    }
  }
}
