"""Session engine: a pure fold over events.

The one hard guarantee everything else hangs on: feeding a fresh engine the
input events recovered from a session log reproduces that log bit for bit.
Clock arithmetic in the cue tests is float-exact on purpose (0.35/0.7 is
exactly 0.5 in binary), so the assertions use == rather than approx.
"""

import json
import math

import pytest

from ergo_assist.engine import (
    ABORTED,
    AWAITING_HUMAN,
    AWAITING_ROBOT,
    DONE,
    IDLE,
    Abort,
    ActiveCue,
    ObjectMoved,
    RobotActionDone,
    Tick,
    TriggerPhrase,
    UserStepDone,
    cue_phase,
    cue_states,
    dispatch,
    emissions,
    event_from_dict,
    event_to_dict,
    happy_path_events,
    input_events,
    log_from_jsonl,
    log_to_jsonl,
    replay,
    session_log,
    start_session,
    tick,
)
from ergo_assist.planner import (
    SPEECH_HOLD_BOTTLE,
    SPEECH_POUR,
    SPEECH_PUSH_GLASS,
    SPEECH_REMOVE_CAP,
    CueSpec,
    make_plan,
)
from ergo_assist.scene import DETACH_OFFSET, Pose2D
from ergo_assist.tasks import TRIGGER_PHRASE


def started(scene):
    return dispatch(start_session(scene), TriggerPhrase(text=TRIGGER_PHRASE))


def kinds(state):
    return [e.kind for e in session_log(state)]


def speeches(state):
    return [e.payload["text"] for e in session_log(state) if e.kind == "Speech"]


# ---------------------------------------------------------------------------
# events
# ---------------------------------------------------------------------------

EXAMPLES = [
    TriggerPhrase(text=TRIGGER_PHRASE),
    RobotActionDone(step_id=3),
    UserStepDone(step_id=2),
    ObjectMoved(object_id="cap", pose=Pose2D(0.1, -0.2, 0.5)),
    Abort(),
    Tick(dt=0.25),
]


@pytest.mark.parametrize("event", EXAMPLES, ids=lambda e: type(e).__name__)
def test_event_dict_round_trip(event):
    assert event_from_dict(event_to_dict(event)) == event


def test_event_from_dict_rejects_unknown_type():
    with pytest.raises(ValueError, match="unknown event type"):
        event_from_dict({"type": "Earthquake"})


@pytest.mark.parametrize("dt", [0.0, -1.0, math.inf, math.nan])
def test_tick_rejects_bad_durations(dt):
    with pytest.raises(ValueError):
        Tick(dt=dt)


def test_dispatch_is_total_over_events_only(paper_scene):
    with pytest.raises(TypeError, match="not an engine event"):
        dispatch(start_session(paper_scene), "hello")


# ---------------------------------------------------------------------------
# session start and trigger
# ---------------------------------------------------------------------------

def test_initial_state_is_idle(paper_scene):
    state = start_session(paper_scene)
    assert state.phase == IDLE
    assert state.plan is None
    assert state.clock == 0.0
    assert state.log == ()
    assert state.current_item is None


def test_trigger_compiles_and_starts(paper_scene):
    state = started(paper_scene)
    assert state.phase == AWAITING_ROBOT
    assert state.plan is not None
    assert state.current_step == 1
    assert kinds(state) == ["Event", "Speech", "RobotAction"]
    assert speeches(state) == [SPEECH_HOLD_BOTTLE]
    robot = session_log(state)[-1]
    assert robot.payload == {"step_id": 1, "verb": "hold", "object": "bottle"}


def test_wrong_phrase_is_ignored(paper_scene):
    state = dispatch(start_session(paper_scene), TriggerPhrase(text="Fetch my slippers."))
    assert state.phase == IDLE
    assert state.plan is None
    entry = session_log(state)[0]
    assert entry.kind == "Event" and entry.payload["status"] == "ignored"


def test_second_trigger_is_ignored(paper_scene):
    state = started(paper_scene)
    again = dispatch(state, TriggerPhrase(text=TRIGGER_PHRASE))
    assert again.phase == state.phase
    assert again.cursor == state.cursor
    assert session_log(again)[-1].payload["status"] == "ignored"


# ---------------------------------------------------------------------------
# progression
# ---------------------------------------------------------------------------

def test_robot_hold_completion_moves_the_bottle(paper_scene):
    state = dispatch(started(paper_scene), RobotActionDone(step_id=1))
    assert state.phase == AWAITING_HUMAN
    assert state.current_step == 2

    bottle = state.scene.object_of_kind("bottle")
    cap = state.scene.object_of_kind("cap")
    arr = state.plan.arrangement
    assert bottle.attached_to == "robot"
    assert bottle.pose.x == pytest.approx(0.18)
    assert bottle.pose.y == pytest.approx(-0.46 + arr.bottle_hold.r)
    # the cap stays screwed on and rides along
    assert cap.attached_to == bottle.id
    assert (cap.pose.x, cap.pose.y) == (bottle.pose.x, bottle.pose.y)

    tail = kinds(state)[-4:]
    assert tail == ["Event", "SceneChanged", "Speech", "CueOn"]
    assert speeches(state)[-1] == SPEECH_REMOVE_CAP
    assert state.active_cues[0].spec == CueSpec("spinning_arrows", anchor="cap")


def test_out_of_order_completions_change_nothing(paper_scene):
    state = started(paper_scene)
    for event in (UserStepDone(step_id=1), RobotActionDone(step_id=4), UserStepDone(step_id=2)):
        after = dispatch(state, event)
        assert session_log(after)[-1].payload["status"] == "ignored"
        assert after.phase == state.phase
        assert after.cursor == state.cursor
        assert after.scene == state.scene
        state = after


def test_unscrew_completes_from_the_pose_feed(paper_scene):
    state = dispatch(started(paper_scene), RobotActionDone(step_id=1))
    bottle = state.scene.object_of_kind("bottle").pose

    # a nudge that stays too close frees the cap but leaves the step open
    nudge = Pose2D(bottle.x + 0.02, bottle.y, 0.0)
    state = dispatch(state, ObjectMoved(object_id="cap", pose=nudge))
    assert state.current_step == 2
    assert state.scene.object_of_kind("cap").attached_to is None
    assert session_log(state)[-1].kind == "SceneChanged"

    # clearing the threshold finishes the step; the cap lands in hand
    away = Pose2D(bottle.x + 0.06, bottle.y, 0.0)
    state = dispatch(state, ObjectMoved(object_id="cap", pose=away))
    assert state.current_step == 3
    cap = state.scene.object_of_kind("cap")
    assert cap.attached_to == "human"
    assert cap.pose.x == pytest.approx(bottle.x + DETACH_OFFSET[0])


def test_cap_placement_completes_within_tolerance(paper_scene):
    state = dispatch(started(paper_scene), RobotActionDone(step_id=1))
    bottle = state.scene.object_of_kind("bottle").pose
    state = dispatch(
        state, ObjectMoved(object_id="cap", pose=Pose2D(bottle.x + 0.06, bottle.y, 0.0))
    )
    assert state.current_step == 3

    drop = state.plan.arrangement.cap_drop_zone
    miss = Pose2D(drop.x + 0.1, drop.y, 0.0)
    state = dispatch(state, ObjectMoved(object_id="cap", pose=miss))
    assert state.current_step == 3 and state.phase == AWAITING_HUMAN

    near = Pose2D(drop.x + 0.01, drop.y, 0.0)
    state = dispatch(state, ObjectMoved(object_id="cap", pose=near))
    # cap snapped onto the zone, free; the silent robot put-down is next
    cap = state.scene.object_of_kind("cap")
    assert cap.pose == drop
    assert cap.attached_to is None
    assert state.phase == AWAITING_ROBOT
    assert state.current_item.actor == "robot"
    assert state.current_item.action.verb == "put_down"


def test_moves_on_held_objects_are_ignored(paper_scene):
    state = dispatch(started(paper_scene), RobotActionDone(step_id=1))
    # the bottle is in the robot's gripper and step 2 manipulates the cap
    grab = ObjectMoved(object_id="bottle", pose=Pose2D(0.0, 0.0, 0.0))
    after = dispatch(state, grab)
    assert session_log(after)[-1].payload["status"] == "ignored"
    assert after.scene == state.scene


def test_moves_on_unknown_objects_are_ignored(paper_scene):
    state = started(paper_scene)
    after = dispatch(state, ObjectMoved(object_id="teapot", pose=Pose2D(0, 0, 0)))
    assert session_log(after)[-1].payload["status"] == "ignored"


def test_pre_trigger_moves_shape_the_plan(paper_scene):
    state = start_session(paper_scene)
    new_glass = Pose2D(0.2, 0.35, 0.0)
    state = dispatch(state, ObjectMoved(object_id="glass", pose=new_glass))
    assert kinds(state) == ["Event", "SceneChanged"]

    state = dispatch(state, TriggerPhrase(text=TRIGGER_PHRASE))
    push_items = [
        i
        for i in state.plan.items
        if i.actor == "robot" and not isinstance(i.action, str) and i.action.verb == "push"
    ]
    comet = push_items[0].cues[1]
    assert comet.anchor == new_glass


# ---------------------------------------------------------------------------
# abort
# ---------------------------------------------------------------------------

def test_abort_kills_cues_and_freezes_the_session(paper_scene):
    state = dispatch(started(paper_scene), RobotActionDone(step_id=1))
    assert state.active_cues

    state = dispatch(state, Abort())
    assert state.phase == ABORTED
    assert state.active_cues == ()
    assert kinds(state)[-2:] == ["Event", "CueOff"]

    # terminal: completions and re-triggers bounce, time still passes
    for event in (UserStepDone(step_id=2), TriggerPhrase(text=TRIGGER_PHRASE), Abort()):
        state = dispatch(state, event)
        assert session_log(state)[-1].payload["status"] == "ignored"
        assert state.phase == ABORTED
    state = tick(state, 1.5)
    assert state.clock == 1.5
    assert session_log(state)[-1].payload["status"] == "applied"


# ---------------------------------------------------------------------------
# cue animation
# ---------------------------------------------------------------------------

def test_comet_phase_wraps_exactly():
    comet = ActiveCue(
        spec=CueSpec(
            "comet_trail", anchor=Pose2D(0, 0, 0), end=Pose2D(1, 0, 0), loop_period=0.7
        ),
        on_at=0.0,
    )
    assert cue_phase(comet, 0.0) == 0.0
    assert cue_phase(comet, 0.35) == 0.5
    assert cue_phase(comet, 0.7) == 0.0
    assert cue_phase(comet, 1.75) == 0.5


def test_arrow_rotation_wraps_at_two_pi():
    arrows = ActiveCue(spec=CueSpec("spinning_arrows", anchor="cap"), on_at=1.0)
    assert cue_phase(arrows, 1.0) == 0.0
    assert cue_phase(arrows, 1.5) == math.pi / 2
    assert cue_phase(arrows, 3.0) == 0.0


def test_static_cue_has_no_phase():
    disc = ActiveCue(spec=CueSpec("target_disc", anchor=Pose2D(0, 0, 0)), on_at=0.0)
    assert cue_phase(disc, 12.0) == 0.0


def test_cue_states_snapshot(paper_scene):
    state = dispatch(started(paper_scene), RobotActionDone(step_id=1))
    state = tick(state, 0.5)
    snap = cue_states(state)
    assert len(snap) == 1
    assert snap[0]["cue"]["kind"] == "spinning_arrows"
    assert snap[0]["phase"] == math.pi / 2


# ---------------------------------------------------------------------------
# happy path, log, replay
# ---------------------------------------------------------------------------

def test_happy_path_reaches_task_complete(paper_scene):
    plan = make_plan(paper_scene)
    state = replay(paper_scene, happy_path_events(plan))
    assert state.phase == DONE
    assert session_log(state)[-1].kind == "TaskComplete"
    assert state.clock == 3 * 3.0 + 4 * 2.0
    assert speeches(state) == [
        SPEECH_HOLD_BOTTLE,
        SPEECH_REMOVE_CAP,
        "Please put the cap on the table",
        SPEECH_PUSH_GLASS,
        SPEECH_POUR,
    ]


def test_happy_path_log_shape_is_frozen(paper_scene):
    """Regression anchor: the full interleaving of inputs and emissions for
    the cooperative run, one entry per line."""
    state = replay(paper_scene, happy_path_events(make_plan(paper_scene)))
    assert kinds(state) == [
        "Event", "Speech", "RobotAction",                                  # trigger
        "Event",                                                           # tick
        "Event", "SceneChanged", "Speech", "CueOn",                        # hold done
        "Event",
        "Event", "SceneChanged", "CueOff", "Speech",                       # cap off
        "Event",
        "Event", "SceneChanged", "RobotAction",                            # cap placed
        "Event",
        "Event", "SceneChanged", "Speech", "CueOn", "CueOn", "RobotAction",  # put-down done
        "Event",
        "Event", "SceneChanged", "CueOff", "Speech",                       # push done
        "Event",
        "Event",                                                           # pour done
        "Event",
        "Event", "SceneChanged", "TaskComplete",                           # glass picked
    ]


def test_happy_path_ends_with_everything_in_place(paper_scene):
    plan = make_plan(paper_scene)
    state = replay(paper_scene, happy_path_events(plan))
    arr = plan.arrangement
    scene = state.scene
    assert scene.object_of_kind("glass").attached_to == "human"
    assert scene.object_of_kind("glass").pose == arr.glass_target
    assert scene.object_of_kind("cap").pose == arr.cap_drop_zone
    assert scene.object_of_kind("bottle").attached_to is None


def test_unimpaired_happy_path_never_calls_the_robot(unimpaired_scene):
    plan = make_plan(unimpaired_scene)
    state = replay(unimpaired_scene, happy_path_events(plan))
    assert state.phase == DONE
    assert state.clock == 5 * 2.0
    assert all(e.kind != "RobotAction" for e in session_log(state))
    cue_kinds = [
        e.payload["cue"]["kind"] for e in session_log(state) if e.kind == "CueOn"
    ]
    assert cue_kinds == ["spinning_arrows"]


def test_log_serialization_round_trips(paper_scene):
    log = session_log(replay(paper_scene, happy_path_events(make_plan(paper_scene))))
    text = log_to_jsonl(log)
    assert log_from_jsonl(text) == log
    for line in text.strip().splitlines():
        json.loads(line)


def test_replay_reproduces_the_log_bit_for_bit(paper_scene):
    original = replay(paper_scene, happy_path_events(make_plan(paper_scene)))
    events = input_events(session_log(original))
    again = replay(paper_scene, events)
    assert session_log(again) == session_log(original)
    assert again.scene == original.scene
    assert again.phase == original.phase


def test_emissions_partition_the_log(paper_scene):
    log = session_log(replay(paper_scene, happy_path_events(make_plan(paper_scene))))
    assert len(emissions(log)) + len(input_events(log)) == len(log)


def test_noise_between_steps_does_not_change_the_outcome(paper_scene):
    """Ignored events appear in the log but never alter scene or phase."""
    plan = make_plan(paper_scene)
    noisy = []
    for event in happy_path_events(plan):
        noisy.append(event)
        # step 5 is human and step 1 is the robot's, so the mismatched
        # completion type can never fire; a re-trigger is dead after start
        noisy.append(RobotActionDone(step_id=5))
        noisy.append(UserStepDone(step_id=1))
        noisy.append(TriggerPhrase(text=TRIGGER_PHRASE))
    clean = replay(paper_scene, happy_path_events(plan))
    state = replay(paper_scene, noisy)
    assert state.phase == clean.phase == DONE
    assert state.scene == clean.scene
    assert emissions(session_log(state)) == emissions(session_log(clean))
