"""Event-driven session engine.

A session is a pure fold: state' = dispatch(state, event).  Nothing in here
does IO, sleeps, or consults a wall clock; time only advances through Tick
events, which is what makes logs replayable bit for bit.

The log keeps every input event (with whether it was applied or ignored)
interleaved with the emissions it produced, so a fresh engine fed the
logged inputs reproduces the identical log.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Iterable

from .arrangement import hold_world_point
from .config import DEFAULT_CONFIG, PlannerConfig
from .planner import CueSpec, Plan, ScriptItem, cue_to_dict, make_plan
from .scene import DETACH_OFFSET, Pose2D, Scene, UnknownObject
from .tasks import TaskTemplate, get_task

# ---------------------------------------------------------------------------
# events
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TriggerPhrase:
    text: str


@dataclass(frozen=True)
class RobotActionDone:
    step_id: int


@dataclass(frozen=True)
class UserStepDone:
    step_id: int


@dataclass(frozen=True)
class ObjectMoved:
    object_id: str
    pose: Pose2D


@dataclass(frozen=True)
class Abort:
    pass


@dataclass(frozen=True)
class Tick:
    dt: float

    def __post_init__(self) -> None:
        if not (isinstance(self.dt, (int, float)) and math.isfinite(self.dt) and self.dt > 0):
            raise ValueError("Tick.dt must be a positive finite number")


Event = TriggerPhrase | RobotActionDone | UserStepDone | ObjectMoved | Abort | Tick

_EVENT_TYPES = {
    "TriggerPhrase": TriggerPhrase,
    "RobotActionDone": RobotActionDone,
    "UserStepDone": UserStepDone,
    "ObjectMoved": ObjectMoved,
    "Abort": Abort,
    "Tick": Tick,
}


def event_to_dict(event: Event) -> dict:
    name = type(event).__name__
    if isinstance(event, TriggerPhrase):
        return {"type": name, "text": event.text}
    if isinstance(event, (RobotActionDone, UserStepDone)):
        return {"type": name, "step_id": event.step_id}
    if isinstance(event, ObjectMoved):
        return {"type": name, "object_id": event.object_id, "pose": event.pose.to_dict()}
    if isinstance(event, Tick):
        return {"type": name, "dt": event.dt}
    return {"type": name}


def event_from_dict(data: dict) -> Event:
    kind = data.get("type")
    cls = _EVENT_TYPES.get(kind)
    if cls is None:
        raise ValueError(f"unknown event type {kind!r}")
    if cls is TriggerPhrase:
        return TriggerPhrase(text=str(data["text"]))
    if cls in (RobotActionDone, UserStepDone):
        return cls(step_id=int(data["step_id"]))
    if cls is ObjectMoved:
        p = data["pose"]
        return ObjectMoved(
            object_id=str(data["object_id"]),
            pose=Pose2D(float(p["x"]), float(p["y"]), float(p.get("yaw", 0.0))),
        )
    if cls is Tick:
        return Tick(dt=float(data["dt"]))
    return Abort()


# ---------------------------------------------------------------------------
# state and log
# ---------------------------------------------------------------------------

IDLE = "idle"
AWAITING_ROBOT = "awaiting_robot"
AWAITING_HUMAN = "awaiting_human"
DONE = "done"
ABORTED = "aborted"


@dataclass(frozen=True)
class ActiveCue:
    spec: CueSpec
    on_at: float


@dataclass(frozen=True)
class LogEntry:
    at: float
    kind: str
    payload: dict


@dataclass(frozen=True)
class EngineState:
    scene: Scene
    task: TaskTemplate
    config: PlannerConfig
    phase: str = IDLE
    plan: Plan | None = None
    cursor: int = 0
    clock: float = 0.0
    active_cues: tuple[ActiveCue, ...] = ()
    log: tuple[LogEntry, ...] = ()

    @property
    def current_item(self) -> ScriptItem | None:
        if self.plan is None or self.cursor >= len(self.plan.items):
            return None
        return self.plan.items[self.cursor]

    @property
    def current_step(self) -> int | None:
        item = self.current_item
        return None if item is None else item.step_id


def start_session(
    scene: Scene, task: TaskTemplate | None = None, config: PlannerConfig = DEFAULT_CONFIG
) -> EngineState:
    """Fresh idle session.  The plan is computed lazily on the trigger
    phrase so pre-trigger ObjectMoved events still influence it."""
    if task is None:
        task = get_task("pouring_water")
    return EngineState(scene=scene, task=task, config=config)


def session_log(state: EngineState) -> tuple[LogEntry, ...]:
    return state.log


def _logged(state: EngineState, kind: str, payload: dict) -> EngineState:
    entry = LogEntry(at=state.clock, kind=kind, payload=payload)
    return replace(state, log=state.log + (entry,))


def _log_event(state: EngineState, event: Event, status: str) -> EngineState:
    return _logged(state, "Event", {"event": event_to_dict(event), "status": status})


# ---------------------------------------------------------------------------
# cue animation
# ---------------------------------------------------------------------------

def cue_phase(cue: ActiveCue, clock: float, config: PlannerConfig = DEFAULT_CONFIG) -> float:
    """Animation phase in [0, 1) for comets, rotation in [0, 2π) for arrows,
    0.0 for static cues."""
    elapsed = clock - cue.on_at
    if cue.spec.kind == "comet_trail":
        return (elapsed / cue.spec.loop_period) % 1.0
    if cue.spec.kind == "spinning_arrows":
        return (config.arrow_angular_velocity * elapsed) % (2.0 * math.pi)
    return 0.0


def cue_states(state: EngineState) -> list[dict]:
    return [
        {
            "cue": cue_to_dict(ac.spec),
            "on_at": ac.on_at,
            "phase": cue_phase(ac, state.clock, state.config),
        }
        for ac in state.active_cues
    ]


# ---------------------------------------------------------------------------
# scene effects
# ---------------------------------------------------------------------------

def _set_object(scene: Scene, object_id: str, pose: Pose2D | None, attached_to) -> Scene:
    """Update one object's pose/attachment; anything attached to it rides
    along (a capped bottle moves cap and all)."""
    obj = scene.object(object_id)
    new_pose = obj.pose if pose is None else pose
    scene = scene.with_object(replace(obj, pose=new_pose, attached_to=attached_to))
    for child in scene.objects:
        if child.attached_to == object_id:
            scene = scene.with_object(
                replace(child, pose=Pose2D(new_pose.x, new_pose.y, child.pose.yaw))
            )
    return scene


def _scene_changed(state: EngineState, object_id: str) -> EngineState:
    obj = state.scene.object(object_id)
    return _logged(
        state,
        "SceneChanged",
        {
            "object": object_id,
            "pose": obj.pose.to_dict(),
            "attached_to": obj.attached_to,
        },
    )


def _apply_completion_effects(state: EngineState, item: ScriptItem) -> EngineState:
    """Object pose and attachment changes implied by finishing an item."""
    scene = state.scene
    plan = state.plan
    bottle = scene.object_of_kind("bottle")
    cap = scene.object_of_kind("cap")
    glass = scene.object_of_kind("glass")
    arr = plan.arrangement

    if item.step_id == 1:
        holder = "robot" if item.actor == "robot" else "human"
        hx, hy = hold_world_point(scene, arr.bottle_hold)
        scene = _set_object(scene, bottle.id, Pose2D(hx, hy, bottle.pose.yaw), holder)
        state = replace(state, scene=scene)
        return _scene_changed(state, bottle.id)

    if item.step_id == 2:
        # Cap comes off into the human's hand, mirrored next to the bottle.
        pose = Pose2D(
            bottle.pose.x + DETACH_OFFSET[0], bottle.pose.y + DETACH_OFFSET[1], cap.pose.yaw
        )
        scene = _set_object(scene, cap.id, pose, "human")
        state = replace(state, scene=scene)
        return _scene_changed(state, cap.id)

    if item.step_id == 3 and item.actor == "human":
        scene = _set_object(scene, cap.id, arr.cap_drop_zone, None)
        state = replace(state, scene=scene)
        return _scene_changed(state, cap.id)

    if item.step_id == 3 and item.actor == "robot":
        dx, dy = hold_world_point(scene, arr.bottle_hold)
        scene = _set_object(scene, bottle.id, Pose2D(dx, dy, bottle.pose.yaw), None)
        state = replace(state, scene=scene)
        return _scene_changed(state, bottle.id)

    if item.step_id == 4 and item.actor == "robot" and not isinstance(item.action, str):
        if item.action.verb == "push":
            scene = _set_object(scene, glass.id, arr.glass_target, None)
            state = replace(state, scene=scene)
            return _scene_changed(state, glass.id)
        return state

    if item.step_id == 5:
        scene = _set_object(scene, glass.id, None, "human")
        state = replace(state, scene=scene)
        return _scene_changed(state, glass.id)

    return state


# ---------------------------------------------------------------------------
# script progression
# ---------------------------------------------------------------------------

def _activate_current(state: EngineState) -> EngineState:
    item = state.current_item
    if item is None:
        state = replace(state, phase=DONE, active_cues=())
        return _logged(state, "TaskComplete", {})
    if item.speech is not None:
        state = _logged(state, "Speech", {"text": item.speech})
    if item.cues:
        cues = tuple(ActiveCue(spec=c, on_at=state.clock) for c in item.cues)
        state = replace(state, active_cues=cues)
        for c in item.cues:
            state = _logged(state, "CueOn", {"cue": cue_to_dict(c)})
    if item.actor == "robot":
        state = replace(state, phase=AWAITING_ROBOT)
        action = item.action
        state = _logged(
            state,
            "RobotAction",
            {
                "step_id": item.step_id,
                "verb": action.verb,
                "object": action.object,
            },
        )
    else:
        state = replace(state, phase=AWAITING_HUMAN)
    return state


def _complete_current(state: EngineState) -> EngineState:
    item = state.current_item
    state = _apply_completion_effects(state, item)
    if state.active_cues:
        state = _logged(
            state, "CueOff", {"cues": [cue_to_dict(ac.spec) for ac in state.active_cues]}
        )
        state = replace(state, active_cues=())
    state = replace(state, cursor=state.cursor + 1)
    return _activate_current(state)


# ---------------------------------------------------------------------------
# geometric completion predicates
# ---------------------------------------------------------------------------

def _step_satisfied(state: EngineState, item: ScriptItem) -> bool:
    """Pose-feed completion check for human steps.

    Only the two cap steps have a geometric reading: the cap is off once it
    sits clear of the bottle, and placed once it is close enough to the drop
    zone.  Other steps complete only through explicit events.
    """
    scene = state.scene
    config = state.config
    cap = scene.object_of_kind("cap")
    bottle = scene.object_of_kind("bottle")
    if item.step_id == 2:
        if cap.attached_to == bottle.id:
            return False
        return cap.pose.distance_to(bottle.pose) >= config.unscrew_min_cap_distance
    if item.step_id == 3 and item.actor == "human":
        if cap.attached_to is not None:
            return False
        drop = state.plan.arrangement.cap_drop_zone
        return cap.pose.distance_to(drop) <= config.cap_place_tolerance
    return False


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def dispatch(state: EngineState, event: Event) -> EngineState:
    """Total transition function: every event yields a new state, and every
    event lands in the log whether it was applied or ignored."""
    if isinstance(event, Tick):
        state = replace(state, clock=state.clock + event.dt)
        return _log_event(state, event, "applied")

    if isinstance(event, TriggerPhrase):
        if state.phase != IDLE or event.text != state.task.trigger_phrase:
            return _log_event(state, event, "ignored")
        plan = make_plan(state.scene, state.task, state.config)
        state = _log_event(state, event, "applied")
        state = replace(state, plan=plan, cursor=0)
        return _activate_current(state)

    if isinstance(event, RobotActionDone):
        item = state.current_item
        if (
            state.phase == AWAITING_ROBOT
            and item is not None
            and item.completion_event == "RobotActionDone"
            and item.step_id == event.step_id
        ):
            state = _log_event(state, event, "applied")
            return _complete_current(state)
        return _log_event(state, event, "ignored")

    if isinstance(event, UserStepDone):
        item = state.current_item
        if (
            state.phase == AWAITING_HUMAN
            and item is not None
            and item.completion_event == "UserStepDone"
            and item.step_id == event.step_id
        ):
            state = _log_event(state, event, "applied")
            return _complete_current(state)
        return _log_event(state, event, "ignored")

    if isinstance(event, ObjectMoved):
        try:
            obj = state.scene.object(event.object_id)
        except UnknownObject:
            return _log_event(state, event, "ignored")
        item = state.current_item
        manipulating = (
            state.phase == AWAITING_HUMAN
            and item is not None
            and state.scene.object_of_kind(state.task.key_frames[item.step_id - 1].manipulated_object).id
            == event.object_id
        )
        if not obj.is_free and not manipulating:
            return _log_event(state, event, "ignored")
        # The pose feed is authoritative; moving an attached object while
        # the human works on it pulls it free.
        scene = _set_object(state.scene, event.object_id, event.pose, None)
        state = replace(state, scene=scene)
        state = _log_event(state, event, "applied")
        state = _scene_changed(state, event.object_id)
        if manipulating and _step_satisfied(state, item):
            return _complete_current(state)
        return state

    if isinstance(event, Abort):
        if state.phase in (DONE, ABORTED):
            return _log_event(state, event, "ignored")
        state = _log_event(state, event, "applied")
        if state.active_cues:
            state = _logged(
                state, "CueOff", {"cues": [cue_to_dict(ac.spec) for ac in state.active_cues]}
            )
        return replace(state, phase=ABORTED, active_cues=())

    raise TypeError(f"not an engine event: {event!r}")


def tick(state: EngineState, dt: float) -> EngineState:
    return dispatch(state, Tick(dt=dt))


# ---------------------------------------------------------------------------
# log serialization and replay
# ---------------------------------------------------------------------------

def log_entry_to_dict(entry: LogEntry) -> dict:
    return {"at": entry.at, "kind": entry.kind, "payload": entry.payload}


def log_entry_from_dict(data: dict) -> LogEntry:
    return LogEntry(at=float(data["at"]), kind=str(data["kind"]), payload=dict(data["payload"]))


def log_to_jsonl(log: Iterable[LogEntry]) -> str:
    return "".join(
        json.dumps(log_entry_to_dict(e), sort_keys=True, separators=(",", ":")) + "\n"
        for e in log
    )


def log_from_jsonl(text: str) -> tuple[LogEntry, ...]:
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if line:
            entries.append(log_entry_from_dict(json.loads(line)))
    return tuple(entries)


def input_events(log: Iterable[LogEntry]) -> tuple[Event, ...]:
    """Recover the raw event sequence from a session log."""
    return tuple(
        event_from_dict(e.payload["event"]) for e in log if e.kind == "Event"
    )


def replay(
    scene: Scene,
    events: Iterable[Event],
    task: TaskTemplate | None = None,
    config: PlannerConfig = DEFAULT_CONFIG,
) -> EngineState:
    state = start_session(scene, task, config)
    for event in events:
        state = dispatch(state, event)
    return state


def emissions(log: Iterable[LogEntry]) -> tuple[LogEntry, ...]:
    return tuple(e for e in log if e.kind != "Event")


def happy_path_events(
    plan: Plan, config: PlannerConfig = DEFAULT_CONFIG, human_step_duration: float = 2.0
) -> tuple[Event, ...]:
    """The canonical cooperative event sequence for a plan: trigger, then a
    tick and the matching completion for every script item in order."""
    events: list[Event] = [TriggerPhrase(text=get_task(plan.task_name).trigger_phrase)]
    for item in plan.items:
        if item.actor == "robot":
            events.append(Tick(dt=config.robot_action_duration))
            events.append(RobotActionDone(step_id=item.step_id))
        else:
            events.append(Tick(dt=human_step_duration))
            events.append(UserStepDone(step_id=item.step_id))
    return tuple(events)
