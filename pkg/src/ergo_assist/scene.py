"""Tabletop world model: domain types, scene ingestion, and pose updates.

The scene is the single source of world truth for the planner, the engine,
and the service.  All types are immutable; every operation returns a new
scene value instead of mutating one in place.

Frame convention: table frame with its origin at the table center, +x toward
the seated user's right, +y away from the user, angles in radians, lengths
in meters, masses in kilograms, heights measured above the human hip pivot.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Any, Iterable, Mapping

import jsonschema

SCHEMA_VERSION = 1

OBJECT_KINDS = ("bottle", "cap", "glass")

#: Where a detached object lands relative to its former parent.
DETACH_OFFSET = (0.06, 0.0)

#: Per-kind fallbacks used when a scene document omits the field.
DEFAULT_GRASP_HEIGHT = {"bottle": 0.12, "cap": 0.03, "glass": 0.10}
DEFAULT_MASS = {"bottle": 1.0, "cap": 0.02, "glass": 0.30}

DEFAULT_TABLE = {"half_extent_x": 0.6, "half_extent_y": 0.4, "top_height": 0.30}

DEFAULT_HUMAN = {
    "hip_anchor": {"x": 0.0, "y": -0.46, "yaw": 0.0},
    "shoulder_lateral_offset": 0.18,
    "torso_length": 0.50,
    "upper_arm_length": 0.30,
    "forearm_length": 0.35,
    "torso_mass": 32.0,
    "upper_arm_mass": 2.0,
    "forearm_mass": 1.7,
    "joint_limits": {
        "torso_pitch": [0.0, math.pi / 3],
        "shoulder_flexion": [-math.pi / 6, math.pi * 5 / 6],
        "elbow_flexion": [0.0, math.pi * 5 / 6],
    },
    "torque_limits": {"torso": 100.0, "shoulder": 40.0, "elbow": 20.0},
}


class SceneError(Exception):
    """Base class for scene-level failures."""


class SchemaError(SceneError):
    """Document does not match the scene schema."""


class ValidationError(SceneError):
    """Document is well-formed but violates a scene invariant."""


class UnknownObject(SceneError):
    """Referenced object id does not exist in the scene."""


class ObjectAttached(SceneError):
    """Operation requires a free object but the object is attached."""


class NotAttached(SceneError):
    """Detach called on an object that is not attached to anything."""


def _normalize_yaw(yaw: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = math.fmod(yaw, math.tau)
    if w <= -math.pi:
        w += math.tau
    elif w > math.pi:
        w -= math.tau
    return w


@dataclass(frozen=True)
class Pose2D:
    """Planar pose on the table surface."""

    x: float
    y: float
    yaw: float = 0.0

    def __post_init__(self) -> None:
        for name in ("x", "y", "yaw"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValidationError(f"pose field {name} must be finite")
        object.__setattr__(self, "yaw", _normalize_yaw(float(self.yaw)))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    def distance_to(self, other: "Pose2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def to_dict(self) -> dict[str, float]:
        return {"x": self.x, "y": self.y, "yaw": self.yaw}


@dataclass(frozen=True)
class Table:
    half_extent_x: float
    half_extent_y: float
    top_height: float

    def contains(self, x: float, y: float) -> bool:
        return abs(x) <= self.half_extent_x and abs(y) <= self.half_extent_y


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle in the table frame (robot workspace)."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def intersects_table(self, table: Table) -> bool:
        return (
            self.x_min <= table.half_extent_x
            and self.x_max >= -table.half_extent_x
            and self.y_min <= table.half_extent_y
            and self.y_max >= -table.half_extent_y
        )


@dataclass(frozen=True)
class JointLimits:
    """Closed intervals for torso pitch, shoulder flexion, elbow flexion."""

    torso_pitch: tuple[float, float]
    shoulder_flexion: tuple[float, float]
    elbow_flexion: tuple[float, float]


@dataclass(frozen=True)
class HumanModel:
    hip_anchor: Pose2D
    shoulder_lateral_offset: float
    torso_length: float
    upper_arm_length: float
    forearm_length: float
    torso_mass: float
    upper_arm_mass: float
    forearm_mass: float
    joint_limits: JointLimits
    torque_limits: tuple[float, float, float]


@dataclass(frozen=True)
class ImpairmentSpec:
    disabled_side: str  # "left" | "right" | "none"
    reach_scale: float
    max_torso_lean: float

    def side_usable(self, side: str) -> bool:
        return side != self.disabled_side


@dataclass(frozen=True)
class ObjectInstance:
    """One manipulable object.

    Attached objects keep a pose value mirroring their parent for display
    purposes, but it is not an independent degree of freedom: pose updates
    on attached objects are rejected.
    """

    id: str
    kind: str
    pose: Pose2D
    grasp_height: float
    mass: float
    attached_to: str | None = None

    @property
    def is_free(self) -> bool:
        return self.attached_to is None


@dataclass(frozen=True)
class Scene:
    table: Table
    objects: tuple[ObjectInstance, ...]
    human: HumanModel
    impairment: ImpairmentSpec
    robot_workspace: Rect

    def object(self, object_id: str) -> ObjectInstance:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise UnknownObject(f"no object with id {object_id!r}")

    def object_of_kind(self, kind: str) -> ObjectInstance:
        for obj in self.objects:
            if obj.kind == kind:
                return obj
        raise UnknownObject(f"no object of kind {kind!r}")

    def with_object(self, updated: ObjectInstance) -> "Scene":
        objs = tuple(updated if o.id == updated.id else o for o in self.objects)
        return replace(self, objects=objs)

    def free_objects(self) -> tuple[ObjectInstance, ...]:
        return tuple(o for o in self.objects if o.is_free)


# ---------------------------------------------------------------------------
# loading and serialization
# ---------------------------------------------------------------------------

def _schema() -> dict[str, Any]:
    text = resources.files("ergo_assist.schema").joinpath("scene_schema_v1.json").read_text()
    return json.loads(text)


_SCHEMA_CACHE: dict[str, Any] | None = None


def _merged(defaults: Mapping[str, Any], given: Mapping[str, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, default in defaults.items():
        value = given.get(key, default)
        if isinstance(default, Mapping) and isinstance(value, Mapping):
            value = _merged(default, value)
        out[key] = value
    return out


def _pose_from(doc: Mapping[str, Any]) -> Pose2D:
    return Pose2D(doc["x"], doc["y"], doc.get("yaw", 0.0))


def load_scene(document: Mapping[str, Any]) -> Scene:
    """Build a validated Scene from a plain JSON document.

    Raises SchemaError for structural problems (unknown keys, wrong types,
    wrong schema_version) and ValidationError for invariant violations; the
    message names the violated invariant.
    """
    global _SCHEMA_CACHE
    if _SCHEMA_CACHE is None:
        _SCHEMA_CACHE = _schema()
    try:
        jsonschema.validate(instance=document, schema=_SCHEMA_CACHE)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"scene document rejected: {exc.message}") from exc

    table_doc = _merged(DEFAULT_TABLE, document.get("table", {}))
    table = Table(**{k: float(v) for k, v in table_doc.items()})

    human_doc = _merged(DEFAULT_HUMAN, document.get("human", {}))
    limits_doc = human_doc["joint_limits"]
    joint_limits = JointLimits(
        torso_pitch=tuple(float(v) for v in limits_doc["torso_pitch"]),
        shoulder_flexion=tuple(float(v) for v in limits_doc["shoulder_flexion"]),
        elbow_flexion=tuple(float(v) for v in limits_doc["elbow_flexion"]),
    )
    torque_doc = human_doc["torque_limits"]
    human = HumanModel(
        hip_anchor=_pose_from(human_doc["hip_anchor"]),
        shoulder_lateral_offset=float(human_doc["shoulder_lateral_offset"]),
        torso_length=float(human_doc["torso_length"]),
        upper_arm_length=float(human_doc["upper_arm_length"]),
        forearm_length=float(human_doc["forearm_length"]),
        torso_mass=float(human_doc["torso_mass"]),
        upper_arm_mass=float(human_doc["upper_arm_mass"]),
        forearm_mass=float(human_doc["forearm_mass"]),
        joint_limits=joint_limits,
        torque_limits=(
            float(torque_doc["torso"]),
            float(torque_doc["shoulder"]),
            float(torque_doc["elbow"]),
        ),
    )
    for name, pair in (
        ("torso_pitch", joint_limits.torso_pitch),
        ("shoulder_flexion", joint_limits.shoulder_flexion),
        ("elbow_flexion", joint_limits.elbow_flexion),
    ):
        if pair[0] > pair[1]:
            raise ValidationError(f"joint limits non-empty: {name}")

    imp_doc = dict(document["impairment"])
    impairment = ImpairmentSpec(
        disabled_side=imp_doc["disabled_side"],
        reach_scale=float(imp_doc.get("reach_scale", 1.0)),
        max_torso_lean=float(imp_doc.get("max_torso_lean", joint_limits.torso_pitch[1])),
    )
    if not (0.0 < impairment.reach_scale <= 1.0):
        raise ValidationError("reach_scale in (0, 1]")

    ws_doc = document["robot_workspace"]
    workspace = Rect(
        x_min=float(ws_doc["x_min"]),
        x_max=float(ws_doc["x_max"]),
        y_min=float(ws_doc["y_min"]),
        y_max=float(ws_doc["y_max"]),
    )
    if workspace.x_min >= workspace.x_max or workspace.y_min >= workspace.y_max:
        raise ValidationError("robot_workspace non-empty")
    if not workspace.intersects_table(table):
        raise ValidationError("robot_workspace intersects table")

    raw_objects = list(document["objects"])
    seen_ids: set[str] = set()
    by_id: dict[str, Mapping[str, Any]] = {}
    for doc in raw_objects:
        if doc["id"] in seen_ids:
            raise ValidationError(f"object ids unique: {doc['id']!r}")
        seen_ids.add(doc["id"])
        by_id[doc["id"]] = doc

    for kind in OBJECT_KINDS:
        count = sum(1 for doc in raw_objects if doc["kind"] == kind)
        if count != 1:
            raise ValidationError(f"exactly one {kind} (found {count})")

    objects: list[ObjectInstance] = []
    for doc in raw_objects:
        attached_to = doc.get("attached_to")
        if attached_to is not None:
            # "human" and "robot" are reserved holder names used mid-session.
            if attached_to not in seen_ids and attached_to not in ("human", "robot"):
                raise ValidationError(f"attached_to references a known object: {attached_to!r}")
            if attached_to == doc["id"]:
                raise ValidationError("attached_to is not self-referential")
        if "pose" in doc:
            pose = _pose_from(doc["pose"])
        elif attached_to in by_id and "pose" in by_id[attached_to]:
            pose = _pose_from(by_id[attached_to]["pose"])
        else:
            raise ValidationError(f"object pose required for free object {doc['id']!r}")
        obj = ObjectInstance(
            id=doc["id"],
            kind=doc["kind"],
            pose=pose,
            grasp_height=float(doc.get("grasp_height", DEFAULT_GRASP_HEIGHT[doc["kind"]])),
            mass=float(doc.get("mass", DEFAULT_MASS[doc["kind"]])),
            attached_to=attached_to,
        )
        if obj.is_free and not table.contains(obj.pose.x, obj.pose.y):
            raise ValidationError(f"object within table: {obj.id!r}")
        objects.append(obj)

    return Scene(
        table=table,
        objects=tuple(objects),
        human=human,
        impairment=impairment,
        robot_workspace=workspace,
    )


def serialize_scene(scene: Scene) -> dict[str, Any]:
    """Emit a schema-v1 document; load_scene(serialize_scene(s)) == s."""
    h = scene.human
    return {
        "schema_version": SCHEMA_VERSION,
        "table": {
            "half_extent_x": scene.table.half_extent_x,
            "half_extent_y": scene.table.half_extent_y,
            "top_height": scene.table.top_height,
        },
        "objects": [
            {
                "id": o.id,
                "kind": o.kind,
                "pose": o.pose.to_dict(),
                "grasp_height": o.grasp_height,
                "mass": o.mass,
                "attached_to": o.attached_to,
            }
            for o in scene.objects
        ],
        "human": {
            "hip_anchor": h.hip_anchor.to_dict(),
            "shoulder_lateral_offset": h.shoulder_lateral_offset,
            "torso_length": h.torso_length,
            "upper_arm_length": h.upper_arm_length,
            "forearm_length": h.forearm_length,
            "torso_mass": h.torso_mass,
            "upper_arm_mass": h.upper_arm_mass,
            "forearm_mass": h.forearm_mass,
            "joint_limits": {
                "torso_pitch": list(h.joint_limits.torso_pitch),
                "shoulder_flexion": list(h.joint_limits.shoulder_flexion),
                "elbow_flexion": list(h.joint_limits.elbow_flexion),
            },
            "torque_limits": {
                "torso": h.torque_limits[0],
                "shoulder": h.torque_limits[1],
                "elbow": h.torque_limits[2],
            },
        },
        "impairment": {
            "disabled_side": scene.impairment.disabled_side,
            "reach_scale": scene.impairment.reach_scale,
            "max_torso_lean": scene.impairment.max_torso_lean,
        },
        "robot_workspace": {
            "x_min": scene.robot_workspace.x_min,
            "x_max": scene.robot_workspace.x_max,
            "y_min": scene.robot_workspace.y_min,
            "y_max": scene.robot_workspace.y_max,
        },
    }


def canonical_json(data: Any) -> str:
    """Stable JSON encoding used for logs, exports, and cache keys."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


# ---------------------------------------------------------------------------
# scene operations
# ---------------------------------------------------------------------------

def apply_pose_update(scene: Scene, object_id: str, pose: Pose2D) -> Scene:
    """Move a free object; attached objects have no independent pose."""
    obj = scene.object(object_id)
    if not obj.is_free:
        raise ObjectAttached(f"object {object_id!r} is attached to {obj.attached_to!r}")
    return scene.with_object(replace(obj, pose=pose))


def detach(scene: Scene, object_id: str) -> Scene:
    """Free an attached object, placing it next to its former parent.

    The new pose is the parent pose offset by DETACH_OFFSET; detaching an
    already-free object raises NotAttached, so detach is not idempotent.
    """
    obj = scene.object(object_id)
    if obj.attached_to is None:
        raise NotAttached(f"object {object_id!r} is not attached")
    if obj.attached_to in ("human", "robot"):
        parent_pose = obj.pose
    else:
        parent_pose = scene.object(obj.attached_to).pose
    new_pose = Pose2D(parent_pose.x + DETACH_OFFSET[0], parent_pose.y + DETACH_OFFSET[1], parent_pose.yaw)
    return scene.with_object(replace(obj, attached_to=None, pose=new_pose))
