"""Ergonomic assistance planning for tabletop manipulation.

Plans where a robot should place and hold objects so a (possibly impaired)
seated user can finish a task comfortably, then simulates the guided
interaction as a deterministic event-sourced session.
"""

from .arrangement import (
    Arrangement,
    Infeasible,
    NoFeasibleArrangement,
    brute_force_arrangement,
    identity_arrangement,
    keyframe_cost,
    optimize_arrangement,
)
from .config import DEFAULT_CONFIG, PlannerConfig
from .engine import (
    Abort,
    EngineState,
    ObjectMoved,
    RobotActionDone,
    Tick,
    TriggerPhrase,
    UserStepDone,
    dispatch,
    happy_path_events,
    replay,
    session_log,
    start_session,
    tick,
)
from .ergonomics import (
    JointLimit,
    Posture,
    ReachTarget,
    SideDisabled,
    Unreachable,
    forward_kinematics,
    gravity_torques,
    posture_cost,
    potential_energy,
    reach_feasible,
    solve_posture,
)
from .planner import (
    AtomicAction,
    CueSpec,
    Plan,
    PlanningFailed,
    ScriptItem,
    allocate_steps,
    compile_script,
    make_plan,
    plan_to_dict,
    predict_human_baseline,
)
from .scene import (
    HumanModel,
    ImpairmentSpec,
    Pose2D,
    SceneError,
    SchemaError,
    Scene,
    ValidationError,
    load_scene,
    serialize_scene,
)
from .tasks import TaskTemplate, get_task, pouring_task

__version__ = "0.1.0"

__all__ = [
    "Abort",
    "Arrangement",
    "AtomicAction",
    "CueSpec",
    "DEFAULT_CONFIG",
    "EngineState",
    "HumanModel",
    "ImpairmentSpec",
    "Infeasible",
    "JointLimit",
    "NoFeasibleArrangement",
    "ObjectMoved",
    "Plan",
    "PlannerConfig",
    "PlanningFailed",
    "Pose2D",
    "Posture",
    "ReachTarget",
    "RobotActionDone",
    "Scene",
    "SceneError",
    "SchemaError",
    "ScriptItem",
    "SideDisabled",
    "TaskTemplate",
    "Tick",
    "TriggerPhrase",
    "Unreachable",
    "UserStepDone",
    "ValidationError",
    "allocate_steps",
    "brute_force_arrangement",
    "compile_script",
    "dispatch",
    "forward_kinematics",
    "get_task",
    "gravity_torques",
    "happy_path_events",
    "identity_arrangement",
    "keyframe_cost",
    "load_scene",
    "make_plan",
    "optimize_arrangement",
    "plan_to_dict",
    "posture_cost",
    "potential_energy",
    "pouring_task",
    "predict_human_baseline",
    "reach_feasible",
    "replay",
    "serialize_scene",
    "session_log",
    "solve_posture",
    "start_session",
    "tick",
]
