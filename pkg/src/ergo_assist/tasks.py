"""Key-frame task templates.

A task is a short sequence of semantic steps; each step is captured by one
key-frame: which object is being manipulated, where hands have to be, and
which relations must hold between objects.  Hand targets reference named
slots that are resolved against a scene and an arrangement at costing time,
so the same template serves baseline prediction, arrangement search, and
script compilation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

TRIGGER_PHRASE = "Help me to get some water."

#: Hand-target roles.  "usable" is the arm the user works with (the
#: non-disabled one, or the cheaper of the two when unimpaired); "other"
#: is the opposite arm, needed only where a step takes two hands.
ROLES = ("usable", "other")

#: Slots a hand target may reference.
SLOTS = (
    "bottle_current",    # the bottle where it stands in the scene
    "bottle_hold",       # the arrangement's bottle-hold pose
    "cap_at_hold",       # the cap on top of the held bottle
    "cap_drop",          # the arrangement's cap drop zone
    "pour_above_glass",  # above the glass target, at pouring height
    "glass_final",       # the glass target, at grasp height
)

#: Slots whose resolved position depends on the arrangement being searched.
ARRANGEMENT_SLOTS = frozenset({"bottle_hold", "cap_at_hold", "cap_drop", "pour_above_glass", "glass_final"})


@dataclass(frozen=True)
class HandTarget:
    role: str
    slot: str
    held_object: str | None = None  # object id whose mass loads the hand

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown hand role {self.role!r}")
        if self.slot not in SLOTS:
            raise ValueError(f"unknown slot {self.slot!r}")


@dataclass(frozen=True)
class Relation:
    """Object constraint: at_position(obj), aligned_above(a, b), held_by(obj, holder)."""

    kind: str
    args: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("at_position", "aligned_above", "held_by"):
            raise ValueError(f"unknown relation {self.kind!r}")


@dataclass(frozen=True)
class KeyFrame:
    step_id: int
    name: str
    actor_hand_targets: tuple[HandTarget, ...]
    object_constraints: tuple[Relation, ...]
    manipulated_object: str

    def __post_init__(self) -> None:
        if not 1 <= self.step_id <= 5:
            raise ValueError("step_id must be in 1..5")


@dataclass(frozen=True)
class TaskTemplate:
    name: str
    key_frames: tuple[KeyFrame, ...]
    trigger_phrase: str


def pouring_task() -> TaskTemplate:
    """The five-step water-pouring task.

    Steps: take the bottle, unscrew the cap, put the cap down, pour into
    the glass, pick the glass up.  Unscrewing takes two hands, so its
    key-frame carries a second, "other"-arm target holding the bottle;
    when that arm is unavailable the hold falls to the robot.
    """
    kf1 = KeyFrame(
        step_id=1,
        name="grasp_lift_bottle",
        actor_hand_targets=(HandTarget("usable", "bottle_current", held_object="bottle"),),
        object_constraints=(Relation("held_by", ("bottle", "actor")),),
        manipulated_object="bottle",
    )
    kf2 = KeyFrame(
        step_id=2,
        name="unscrew_cap",
        actor_hand_targets=(
            HandTarget("usable", "cap_at_hold"),
            HandTarget("other", "bottle_hold", held_object="bottle"),
        ),
        object_constraints=(Relation("held_by", ("bottle", "holder")),),
        manipulated_object="cap",
    )
    kf3 = KeyFrame(
        step_id=3,
        name="place_cap",
        actor_hand_targets=(HandTarget("usable", "cap_drop", held_object="cap"),),
        object_constraints=(Relation("at_position", ("cap",)),),
        manipulated_object="cap",
    )
    kf4 = KeyFrame(
        step_id=4,
        name="pour",
        actor_hand_targets=(HandTarget("usable", "pour_above_glass", held_object="bottle"),),
        object_constraints=(
            Relation("aligned_above", ("bottle", "glass")),
            Relation("held_by", ("bottle", "human")),
        ),
        manipulated_object="bottle",
    )
    kf5 = KeyFrame(
        step_id=5,
        name="pick_up_glass",
        actor_hand_targets=(HandTarget("usable", "glass_final", held_object="glass"),),
        object_constraints=(Relation("held_by", ("glass", "human")),),
        manipulated_object="glass",
    )
    return TaskTemplate(
        name="pouring_water",
        key_frames=(kf1, kf2, kf3, kf4, kf5),
        trigger_phrase=TRIGGER_PHRASE,
    )


_REGISTRY = {"pouring_water": pouring_task}


def get_task(name: str) -> TaskTemplate:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ValueError(f"unknown task {name!r}; available: {sorted(_REGISTRY)}") from None
