/** Browser entry point: wires the service client, canvas, and control panel together. */

import { ServiceClient, ServiceError } from "./api.js";
import type { FixtureListing } from "./api.js";
import { controlPanel, objectMovedEvent } from "./controls.js";
import { paint, renderCues, renderScene } from "./render.js";
import type { WorldTransform } from "./render.js";
import type { LogEntry, PlanDto, SceneDto } from "./protocol.js";
import { parseLogLine } from "./protocol.js";
import {
  applyEntry,
  applySummary,
  costBars,
  initialViewModel,
} from "./viewmodel.js";
import type { ViewModel } from "./viewmodel.js";

// ?service=http://host:port points the console at a service on another
// origin; by default it talks to whoever served the page.
const serviceBase =
  new URLSearchParams(window.location.search).get("service") ?? window.location.origin;
const client = new ServiceClient(serviceBase);

let vm: ViewModel = initialViewModel();
let clockReceivedAtMs = performance.now();
let plan: PlanDto | null = null;
let socket: WebSocket | null = null;
let fixtures: FixtureListing[] = [];
let dragging: { id: string; x: number; y: number } | null = null;

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const fixtureSelect = document.getElementById("fixture") as HTMLSelectElement;
const impairmentSelect = document.getElementById("impairment") as HTMLSelectElement;
const startButton = document.getElementById("start") as HTMLButtonElement;
const replanButton = document.getElementById("replan") as HTMLButtonElement;
const speakToggle = document.getElementById("speak") as HTMLInputElement;
const phaseBadge = document.getElementById("phase")!;
const clockLabel = document.getElementById("clock")!;
const speechBanner = document.getElementById("speech")!;
const controlsDiv = document.getElementById("controls")!;
const barsDiv = document.getElementById("bars")!;
const statusLine = document.getElementById("status")!;

function setModel(next: ViewModel): void {
  if (next.speech !== vm.speech && next.speech && speakToggle.checked) {
    if ("speechSynthesis" in window) {
      window.speechSynthesis.speak(new SpeechSynthesisUtterance(next.speech));
    }
  }
  vm = next;
  clockReceivedAtMs = performance.now();
  renderPanel();
}

async function refreshSummary(): Promise<void> {
  if (!vm.sessionId) return;
  setModel(applySummary(vm, await client.summary(vm.sessionId)));
}

function onEntry(entry: LogEntry): void {
  setModel(applyEntry(vm, entry));
  // Phase and step are not carried on log entries; ask the service.
  void refreshSummary();
}

function subscribe(sessionId: string): void {
  socket?.close();
  socket = new WebSocket(client.streamUrl(sessionId));
  socket.onmessage = (msg) => onEntry(parseLogLine(String(msg.data)));
  socket.onclose = () => {
    statusLine.textContent = "stream closed";
  };
}

async function startSession(): Promise<void> {
  const fixture = fixtures.find((f) => f.name === fixtureSelect.value);
  if (!fixture) return;
  const scene: SceneDto = JSON.parse(JSON.stringify(fixture.scene));
  scene.impairment.disabled_side = impairmentSelect.value;
  plan = null;
  try {
    const created = await client.createSession(scene);
    const summary = await client.summary(created.session_id);
    setModel(applySummary(initialViewModel(), summary));
    subscribe(created.session_id);
    statusLine.textContent = `session ${created.session_id}`;
    await fetchPlan();
  } catch (err) {
    statusLine.textContent = describeError(err);
  }
}

async function fetchPlan(): Promise<void> {
  if (!vm.sessionId) return;
  try {
    plan = await client.plan(vm.sessionId);
    renderBars();
  } catch (err) {
    plan = null;
    barsDiv.textContent = "";
    statusLine.textContent = describeError(err);
  }
}

function describeError(err: unknown): string {
  if (err instanceof ServiceError) {
    const body = err.body as { error?: string; detail?: string } | null;
    if (body?.error) return body.detail ? `${body.error}: ${body.detail}` : body.error;
    return `service returned ${err.status}`;
  }
  return String(err);
}

function renderBars(): void {
  barsDiv.textContent = "";
  if (!plan) return;
  const rows = costBars(plan);
  const scale = Math.max(...rows.map((r) => Math.max(r.baseline ?? 0, r.assisted)), 1e-9);
  for (const row of rows) {
    const div = document.createElement("div");
    div.className = "bar-row";
    const name = document.createElement("span");
    name.textContent = `step ${String(row.stepId)} (${row.actor})`;
    div.appendChild(name);
    div.appendChild(bar("baseline", row.baseline, row.baselineLabel, scale));
    div.appendChild(bar("assisted", row.assisted, row.assistedLabel, scale));
    barsDiv.appendChild(div);
  }
}

function bar(cls: string, value: number | null, label: string, scale: number): HTMLElement {
  const wrap = document.createElement("span");
  wrap.className = `bar ${cls}`;
  const fill = document.createElement("span");
  fill.className = "fill";
  fill.style.width = value === null ? "100%" : `${(100 * value) / scale}%`;
  wrap.appendChild(fill);
  const text = document.createElement("span");
  text.className = "value";
  text.textContent = label;
  wrap.appendChild(text);
  return wrap;
}

function renderPanel(): void {
  phaseBadge.textContent = vm.phase;
  phaseBadge.dataset["phase"] = vm.phase;
  clockLabel.textContent = String(vm.clock);
  speechBanner.textContent = vm.speech ?? "";
  controlsDiv.textContent = "";
  for (const control of controlPanel(vm.phase, vm.step)) {
    const button = document.createElement("button");
    button.id = control.id;
    button.textContent = control.label;
    button.disabled = !control.enabled;
    button.onclick = async () => {
      if (!vm.sessionId) return;
      const resp = await client.postEvent(vm.sessionId, control.event);
      statusLine.textContent = resp.status === "ignored" ? "event ignored" : "";
      // Emissions arrive over the websocket; just take the new phase here.
      setModel({ ...vm, phase: resp.phase, step: resp.step, clock: resp.clock });
    };
    controlsDiv.appendChild(button);
  }
}

function worldTransform(): WorldTransform {
  return { scale: canvas.width / 1.6, cx: canvas.width / 2, cy: canvas.height / 2 };
}

function canvasToWorld(ev: MouseEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  const t = worldTransform();
  const px = ((ev.clientX - rect.left) / rect.width) * canvas.width;
  const py = ((ev.clientY - rect.top) / rect.height) * canvas.height;
  return { x: (px - t.cx) / t.scale, y: (t.cy - py) / t.scale };
}

canvas.addEventListener("mousedown", (ev) => {
  if (!vm.scene) return;
  const p = canvasToWorld(ev);
  for (const obj of vm.scene.objects) {
    if (Math.hypot(obj.pose.x - p.x, obj.pose.y - p.y) < 0.06 && !obj.attached_to) {
      dragging = { id: obj.id, x: p.x, y: p.y };
      return;
    }
  }
});
canvas.addEventListener("mousemove", (ev) => {
  if (dragging) {
    const p = canvasToWorld(ev);
    dragging.x = p.x;
    dragging.y = p.y;
  }
});
canvas.addEventListener("mouseup", async () => {
  if (!dragging || !vm.sessionId) {
    dragging = null;
    return;
  }
  const { id, x, y } = dragging;
  dragging = null;
  await client.postEvent(vm.sessionId, objectMovedEvent(id, x, y));
  if (vm.phase === "idle") await fetchPlan();
});

function frame(): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (vm.scene) {
    const t = worldTransform();
    let scene = vm.scene;
    if (dragging) {
      const d = dragging;
      scene = {
        ...scene,
        objects: scene.objects.map((o) =>
          o.id === d.id ? { ...o, pose: { ...o.pose, x: d.x, y: d.y } } : o,
        ),
      };
    }
    paint(ctx, renderScene(scene), t);
    const estimatedClock = vm.clock + (performance.now() - clockReceivedAtMs) / 1000;
    paint(ctx, renderCues(vm, estimatedClock), t);
  }
  requestAnimationFrame(frame);
}

async function boot(): Promise<void> {
  try {
    fixtures = await client.listFixtures();
  } catch (err) {
    statusLine.textContent = describeError(err);
    return;
  }
  fixtureSelect.textContent = "";
  for (const f of fixtures) {
    const opt = document.createElement("option");
    opt.value = f.name;
    opt.textContent = f.name;
    fixtureSelect.appendChild(opt);
  }
  startButton.onclick = () => void startSession();
  replanButton.onclick = () => void fetchPlan();
  renderPanel();
  requestAnimationFrame(frame);
}

void boot();
