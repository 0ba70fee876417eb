"""Acceptance gate: one test per headline guarantee.

Each test prints a single PASS/FAIL line including the measured margin
and runtime; run `pytest tests/test_acceptance.py -v -s` to see them.
Expected strings and tolerances are written out literally here on
purpose, so a regression in the library constants cannot hide by
updating both sides at once.
"""

import math
import random
import time
from pathlib import Path

from click.testing import CliRunner
from starlette.testclient import TestClient

from ergo_assist import engine as eng
from ergo_assist.arrangement import (
    NoFeasibleArrangement,
    arrangement_total_cost,
    brute_force_arrangement,
    optimize_arrangement,
)
from ergo_assist.cli import main as cli_main
from ergo_assist.ergonomics import (
    Posture,
    ReachTarget,
    forward_kinematics,
    gravity_torques,
    posture_cost,
    potential_energy,
    reach_feasible,
    solve_posture,
    torso_scan_grid,
)
from ergo_assist.planner import Infeasible, make_plan
from ergo_assist.scene import Pose2D, load_scene
from ergo_assist.service import create_app
from ergo_assist.tasks import get_task

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
G = 9.81

TRIGGER = "Help me to get some water."
SPEECHES = (
    "I will hold the bottle",
    "Please remove the cap",
    "Please put the cap on the table",
    "I will push the glass.",
    "You can pour into the glass.",
)


def _report(num: int, name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {name} ({detail})"
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------
# 1. analytic torques match the energy gradient
# ---------------------------------------------------------------------------

def test_criterion_1_torque_energy_consistency(unimpaired_scene):
    model = unimpaired_scene.human
    jl = model.joint_limits
    ranges = (jl.torso_pitch, jl.shoulder_flexion, jl.elbow_flexion)
    rng = random.Random(20260817)
    h = 1e-6

    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        angles = [rng.uniform(lo + 1e-5, hi - 1e-5) for lo, hi in ranges]
        held = rng.uniform(0.0, 2.0)
        tau = gravity_torques(model, Posture(*angles, side="right"), held)
        for i, analytic in enumerate((tau.torso, tau.shoulder, tau.elbow)):
            plus, minus = list(angles), list(angles)
            plus[i] += h
            minus[i] -= h
            fd = (
                potential_energy(model, Posture(*plus, side="right"), held)
                - potential_energy(model, Posture(*minus, side="right"), held)
            ) / (2 * h)
            worst = max(worst, abs(analytic - fd))
    elapsed = time.perf_counter() - t0

    _report(
        1,
        "torque-energy consistency",
        worst < 1e-4 and elapsed < 1.0,
        f"max |tau - dU/dq| = {worst:.2e} N*m over 100 postures, {elapsed:.2f} s < 1 s",
    )


# ---------------------------------------------------------------------------
# 2. IK solutions reach the target and never lose to a dense scan
# ---------------------------------------------------------------------------

def _scan_cost(model, impairment, target, held=0.0, step_deg=0.5):
    """Independent reference: 0.5 degree torso scan closed with the law of
    cosines, costed with the textbook static-torque formulas."""
    l0, l1, l2 = model.torso_length, model.upper_arm_length, model.forearm_length
    m0, m1, m2 = model.torso_mass, model.upper_arm_mass, model.forearm_mass
    jl = model.joint_limits
    lim = model.torque_limits
    reach = (l1 + l2) * impairment.reach_scale

    best = None
    for theta0 in torso_scan_grid(model, impairment, step_deg):
        dr = target.r - l0 * math.sin(theta0)
        dz = target.z - l0 * math.cos(theta0)
        d = math.hypot(dr, dz)
        if d < abs(l1 - l2) or d > reach or d <= 1e-9:
            continue
        cos_el = max(-1.0, min(1.0, (l1 * l1 + l2 * l2 - d * d) / (2 * l1 * l2)))
        theta2 = math.pi - math.acos(cos_el)
        cos_sh = max(-1.0, min(1.0, (l1 * l1 + d * d - l2 * l2) / (2 * l1 * d)))
        theta1 = math.atan2(dr, -dz) - math.acos(cos_sh)
        if not jl.shoulder_flexion[0] - 1e-9 <= theta1 <= jl.shoulder_flexion[1] + 1e-9:
            continue
        if not jl.elbow_flexion[0] - 1e-9 <= theta2 <= jl.elbow_flexion[1] + 1e-9:
            continue
        s0, s1, s12 = math.sin(theta0), math.sin(theta1), math.sin(theta1 + theta2)
        tau0 = -G * l0 * s0 * (0.5 * m0 + m1 + m2 + held)
        tau1 = G * (
            m1 * 0.5 * l1 * s1
            + m2 * (l1 * s1 + 0.5 * l2 * s12)
            + held * (l1 * s1 + l2 * s12)
        )
        tau2 = G * (0.5 * m2 + held) * l2 * s12
        cost = (tau0 / lim[0]) ** 2 + (tau1 / lim[1]) ** 2 + (tau2 / lim[2]) ** 2
        if best is None or cost < best:
            best = cost
    return best


def test_criterion_2_ik_against_dense_scan(unimpaired_scene):
    model = unimpaired_scene.human
    imp = unimpaired_scene.impairment

    t0 = time.perf_counter()
    checked = 0
    worst_residual = 0.0
    worst_excess = 0.0
    for ri in range(1, 46):           # r = 0.02 .. 0.90
        for zi in range(-15, 46):     # z = -0.30 .. 0.90
            target = ReachTarget(0.02 * ri, 0.02 * zi)
            if not reach_feasible(model, imp, target, "right"):
                continue
            posture = solve_posture(model, imp, target, "right")
            hand = forward_kinematics(model, posture).hand
            worst_residual = max(
                worst_residual, math.hypot(hand[0] - target.r, hand[1] - target.z)
            )
            oracle = _scan_cost(model, imp, target)
            if oracle is not None:
                cost = posture_cost(model, posture)
                worst_excess = max(worst_excess, cost / oracle - 1.0)
            checked += 1
    elapsed = time.perf_counter() - t0

    _report(
        2,
        "IK correctness on a 2 cm grid",
        checked > 500
        and worst_residual < 1e-6
        and worst_excess <= 1e-9
        and elapsed < 30.0,
        f"{checked} reachable targets, max residual {worst_residual:.2e} m, "
        f"max cost excess over 0.5 deg scan {worst_excess:.2e}, {elapsed:.1f} s < 30 s",
    )


# ---------------------------------------------------------------------------
# 3. vectorized search equals exhaustive enumeration
# ---------------------------------------------------------------------------

def _random_scene_doc(rng):
    hx = rng.uniform(0.20, 0.25)
    hy = rng.uniform(0.15, 0.175)

    def spot():
        return {
            "x": round(rng.uniform(-hx + 0.05, hx - 0.05), 3),
            "y": round(rng.uniform(-hy + 0.05, hy - 0.05), 3),
        }

    return {
        "schema_version": 1,
        "table": {
            "half_extent_x": round(hx, 3),
            "half_extent_y": round(hy, 3),
            "top_height": 0.3,
        },
        "human": {"hip_anchor": {"x": 0.0, "y": -0.46, "yaw": 0.0}},
        "impairment": {
            "disabled_side": rng.choice(["none", "left"]),
            "reach_scale": round(rng.uniform(0.9, 1.0), 3),
            "max_torso_lean": round(rng.uniform(0.15, 0.6), 3),
        },
        "robot_workspace": {"x_min": -0.6, "x_max": 0.6, "y_min": -0.3, "y_max": 0.4},
        "objects": [
            {"id": "bottle", "kind": "bottle", "pose": spot()},
            {"id": "cap", "kind": "cap", "attached_to": "bottle"},
            {"id": "glass", "kind": "glass", "pose": spot()},
        ],
    }


def test_criterion_3_search_equals_brute_force():
    task = get_task("pouring_water")
    rng = random.Random(42)

    t0 = time.perf_counter()
    compared = 0
    skipped = 0
    mismatches = 0
    while compared < 20:
        scene = load_scene(_random_scene_doc(rng))
        try:
            fast = optimize_arrangement(scene, task, grid_step=0.05)
        except NoFeasibleArrangement:
            skipped += 1
            continue
        slow, _ = brute_force_arrangement(scene, task, 0.05)
        if fast != slow:
            mismatches += 1
        elif arrangement_total_cost(scene, task, fast) != arrangement_total_cost(
            scene, task, slow
        ):
            mismatches += 1
        compared += 1
    elapsed = time.perf_counter() - t0

    _report(
        3,
        "arrangement oracle equivalence",
        mismatches == 0 and elapsed < 120.0,
        f"20 randomized scenes at 5 cm grid, {mismatches} mismatches, "
        f"{skipped} infeasible draws skipped, {elapsed:.1f} s < 120 s",
    )


# ---------------------------------------------------------------------------
# 4. the reference scenario compiles to the published interaction script
# ---------------------------------------------------------------------------

def test_criterion_4_reference_scenario_script(paper_scene):
    plan = make_plan(paper_scene)
    arr = plan.arrangement
    failures = []

    if plan.interventions != ("hold_bottle", "push_glass"):
        failures.append(f"interventions {plan.interventions}")

    robot_work = [
        (i.action.verb, i.action.object)
        for i in plan.items
        if i.actor == "robot"
    ]
    if robot_work != [("hold", "bottle"), ("put_down", "bottle"), ("push", "glass")]:
        failures.append(f"robot actions {robot_work}")
    human_steps = [i.step_id for i in plan.items if i.actor == "human"]
    if human_steps != [2, 3, 4, 5]:
        failures.append(f"human steps {human_steps}")

    speeches = tuple(i.speech for i in plan.items if i.speech is not None)
    if speeches != SPEECHES:
        failures.append(f"speech lines {speeches!r}")

    cues = {c.kind: c for i in plan.items for c in i.cues}
    arrows = cues.get("spinning_arrows")
    if arrows is None or arrows.anchor != "cap":
        failures.append(f"spinning_arrows {arrows}")
    disc = cues.get("target_disc")
    if disc is None or disc.anchor != arr.glass_target:
        failures.append(f"target_disc {disc}")
    comet = cues.get("comet_trail")
    if comet is None or comet.loop_period != 0.7 or comet.end != arr.glass_target:
        failures.append(f"comet_trail {comet}")

    _report(
        4,
        "reference scenario script",
        not failures,
        "; ".join(failures) if failures else
        "allocation, 5 speech lines and all 3 cue bindings exact",
    )


# ---------------------------------------------------------------------------
# 5. assistance never hurts, impairment never helps
# ---------------------------------------------------------------------------

def test_criterion_5_improvement_and_monotonicity(paper_scene, unimpaired_scene):
    task = get_task("pouring_water")
    failures = []

    for label, scene in (("impaired", paper_scene), ("unimpaired", unimpaired_scene)):
        plan = make_plan(scene)
        for i in range(5):
            baseline, assisted = plan.baseline[i], plan.assisted_cost[i]
            if plan.step_actors[i] == "robot":
                if assisted != 0.0:
                    failures.append(f"{label} step {i + 1} robot cost {assisted}")
            elif not isinstance(baseline, Infeasible):
                if assisted > baseline * (1 + 1e-12):
                    failures.append(
                        f"{label} step {i + 1}: assisted {assisted} > baseline {baseline}"
                    )

    impaired_total = arrangement_total_cost(
        paper_scene, task, optimize_arrangement(paper_scene, task)
    )
    unimpaired_total = arrangement_total_cost(
        unimpaired_scene, task, optimize_arrangement(unimpaired_scene, task)
    )
    if not impaired_total >= unimpaired_total:
        failures.append(f"impaired {impaired_total} < unimpaired {unimpaired_total}")

    _report(
        5,
        "improvement and monotonicity",
        not failures,
        "; ".join(failures) if failures else
        f"assisted <= baseline on both fixtures; impaired optimum "
        f"{impaired_total:.4f} >= unimpaired {unimpaired_total:.4f}",
    )


# ---------------------------------------------------------------------------
# 6. the engine is a pure function of its event sequence
# ---------------------------------------------------------------------------

FUZZ_POSES = (
    Pose2D(0.05, 0.05, 0.0),
    Pose2D(0.22, -0.18, 0.0),
    Pose2D(-0.30, 0.20, 0.0),
    Pose2D(0.40, 0.10, 0.0),
)


def _fuzz_events(rng):
    events = []
    if rng.random() < 0.2:
        # a pre-trigger nudge exercises the lazy replan path
        events.append(
            eng.ObjectMoved(
                object_id=rng.choice(("glass", "bottle")),
                pose=rng.choice(FUZZ_POSES[:2]),
            )
        )
    events.append(eng.TriggerPhrase(text=TRIGGER))
    for _ in range(rng.randrange(20, 40)):
        k = rng.random()
        if k < 0.30:
            events.append(eng.Tick(dt=rng.choice((0.25, 0.5, 1.0, 3.0))))
        elif k < 0.55:
            events.append(eng.RobotActionDone(step_id=rng.randrange(1, 6)))
        elif k < 0.80:
            events.append(eng.UserStepDone(step_id=rng.randrange(1, 6)))
        elif k < 0.97:
            events.append(
                eng.ObjectMoved(
                    object_id=rng.choice(("bottle", "cap", "glass", "mug")),
                    pose=rng.choice(FUZZ_POSES),
                )
            )
        else:
            events.append(eng.Abort())
    return events


def test_criterion_6_engine_determinism(paper_scene):
    t0 = time.perf_counter()

    nondeterministic = 0
    for seed in range(1000):
        events = _fuzz_events(random.Random(seed))
        first = eng.replay(paper_scene, events)
        second = eng.replay(paper_scene, events)
        if (
            eng.session_log(first) != eng.session_log(second)
            or first.scene != second.scene
            or first.phase != second.phase
        ):
            nondeterministic += 1

    happy = eng.replay(paper_scene, eng.happy_path_events(make_plan(paper_scene)))
    completed = happy.phase == eng.DONE and eng.session_log(happy)[-1].kind == "TaskComplete"

    # every stale or mismatched completion must leave everything but the
    # log untouched, at every point along the happy path
    stale_probes = 0
    altered = 0
    state = eng.start_session(paper_scene)
    for event in eng.happy_path_events(make_plan(paper_scene)):
        for step_id in range(1, 6):
            for wrong in (eng.RobotActionDone(step_id=step_id), eng.UserStepDone(step_id=step_id)):
                probe = eng.dispatch(state, wrong)
                first_new = eng.session_log(probe)[len(eng.session_log(state))]
                if first_new.payload["status"] != "ignored":
                    continue
                stale_probes += 1
                if (
                    probe.scene != state.scene
                    or probe.phase != state.phase
                    or probe.cursor != state.cursor
                    or probe.clock != state.clock
                    or probe.active_cues != state.active_cues
                ):
                    altered += 1
        state = eng.dispatch(state, event)
    elapsed = time.perf_counter() - t0

    _report(
        6,
        "engine determinism",
        nondeterministic == 0 and completed and altered == 0,
        f"1000 fuzzed replays identical ({nondeterministic} diverged), happy path "
        f"reaches TaskComplete, {altered}/{stale_probes} stale completions altered "
        f"state, {elapsed:.1f} s",
    )


# ---------------------------------------------------------------------------
# 7. the CLI and the service narrate a session identically
# ---------------------------------------------------------------------------

def test_criterion_7_cli_service_parity(tmp_path, paper_doc, paper_scene):
    result = CliRunner().invoke(
        cli_main, ["simulate", "--scene", str(FIXTURES / "paper_scenario.json")]
    )

    events = eng.happy_path_events(make_plan(paper_scene))
    app = create_app(data_dir=tmp_path, auto_robot=False)
    with TestClient(app) as client:
        sid = client.post("/sessions", json={"scene": paper_doc}).json()["session_id"]
        for event in events:
            client.post(f"/sessions/{sid}/events", json=eng.event_to_dict(event))
        served = client.get(f"/sessions/{sid}/log").text

    ok = result.exit_code == 0 and result.output == served
    _report(
        7,
        "CLI/service parity",
        ok,
        f"{len(served.splitlines())} log lines byte-identical",
    )
