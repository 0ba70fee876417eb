"""Command line entry points.

Exit codes: 0 success, 2 input validation failure, 3 no feasible
arrangement, 4 simulation ended without task completion.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import engine as eng
from .arrangement import NoFeasibleArrangement, brute_force_arrangement
from .config import DEFAULT_CONFIG
from .planner import make_plan, plan_to_dict
from .scene import SceneError, load_scene
from .tasks import get_task

EXIT_VALIDATION = 2
EXIT_NO_ARRANGEMENT = 3
EXIT_INCOMPLETE = 4


def _load_inputs(scene_path: str, task_name: str):
    path = Path(scene_path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
        scene = load_scene(doc)
        task = get_task(task_name)
    except (OSError, SceneError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    return scene, task


def _fmt_cost(cost) -> str:
    if isinstance(cost, dict):
        return f"infeasible ({cost['infeasible']})"
    return f"{cost:.4f}"


@click.group()
def main() -> None:
    """Assistive tabletop planner and interaction simulator."""


@main.command("plan")
@click.option("--scene", "scene_path", required=True, help="Scene JSON file.")
@click.option("--task", "task_name", default="pouring_water", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit the machine-readable plan.")
def cli_plan(scene_path: str, task_name: str, as_json: bool) -> None:
    """Compute the arrangement, allocation and script for a scene."""
    scene, task = _load_inputs(scene_path, task_name)
    try:
        plan = make_plan(scene, task)
    except NoFeasibleArrangement as exc:
        click.echo(f"error: no feasible arrangement: {exc}", err=True)
        sys.exit(EXIT_NO_ARRANGEMENT)
    doc = plan_to_dict(plan)
    if as_json:
        click.echo(json.dumps(doc, sort_keys=True, separators=(",", ":")))
        return
    arr = doc["arrangement"]
    click.echo("arrangement:")
    click.echo(f"  glass_target: ({arr['glass_target']['x']:.3f}, {arr['glass_target']['y']:.3f})")
    click.echo(f"  bottle_hold: r={arr['bottle_hold']['r']:.3f} z={arr['bottle_hold']['z']:.3f}")
    click.echo(
        f"  cap_drop_zone: ({arr['cap_drop_zone']['x']:.3f}, {arr['cap_drop_zone']['y']:.3f})"
    )
    click.echo("steps:")
    click.echo("  step  actor  baseline          assisted")
    for i in range(5):
        click.echo(
            f"  {i + 1:>4}  {doc['step_actors'][i]:<5}  "
            f"{_fmt_cost(doc['baseline'][i]):<16}  {_fmt_cost(doc['assisted_cost'][i])}"
        )
    names = ", ".join(doc["interventions"]) if doc["interventions"] else "none"
    click.echo(f"interventions: {names}")


def _events_from_file(path: Path) -> list[eng.Event]:
    """Accept either raw event lines or an exported session log."""
    events: list[eng.Event] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        doc = json.loads(line)
        if "type" in doc:
            events.append(eng.event_from_dict(doc))
        elif doc.get("kind") == "Event":
            events.append(eng.event_from_dict(doc["payload"]["event"]))
        # emission lines in an exported log carry no input to replay
    return events


@main.command("simulate")
@click.option("--scene", "scene_path", required=True, help="Scene JSON file.")
@click.option("--task", "task_name", default="pouring_water", show_default=True)
@click.option(
    "--script",
    default="happy",
    show_default=True,
    help="'happy' for the canonical cooperative run, or a path to an events file.",
)
def cli_simulate(scene_path: str, task_name: str, script: str) -> None:
    """Run a headless session and print its log as JSON Lines."""
    scene, task = _load_inputs(scene_path, task_name)
    if script == "happy":
        try:
            plan = make_plan(scene, task)
        except NoFeasibleArrangement as exc:
            click.echo(f"error: no feasible arrangement: {exc}", err=True)
            sys.exit(EXIT_NO_ARRANGEMENT)
        events = list(eng.happy_path_events(plan))
    else:
        events_path = Path(script)
        try:
            events = _events_from_file(events_path)
        except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
    try:
        state = eng.replay(scene, events, task)
    except NoFeasibleArrangement as exc:
        click.echo(f"error: no feasible arrangement: {exc}", err=True)
        sys.exit(EXIT_NO_ARRANGEMENT)
    click.echo(eng.log_to_jsonl(state.log), nl=False)
    if state.phase != eng.DONE:
        sys.exit(EXIT_INCOMPLETE)


@main.command("oracle")
@click.option("--scene", "scene_path", required=True, help="Scene JSON file.")
@click.option("--task", "task_name", default="pouring_water", show_default=True)
@click.option("--grid", default=0.05, show_default=True, help="Grid step in meters.")
@click.option("--out", "out_path", default=None, help="Write the cost table CSV here.")
def cli_oracle(scene_path: str, task_name: str, grid: float, out_path: str | None) -> None:
    """Exhaustive arrangement search; prints the argmin and cost table size."""
    scene, task = _load_inputs(scene_path, task_name)
    try:
        best, table = brute_force_arrangement(scene, task, grid)
    except NoFeasibleArrangement as exc:
        click.echo(f"error: no feasible arrangement: {exc}", err=True)
        sys.exit(EXIT_NO_ARRANGEMENT)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    n_glass, n_cap, n_hold = table.cands.counts
    click.echo(f"candidates: glass={n_glass} cap={n_cap} hold={n_hold} combos={table.size}")
    click.echo(
        "argmin: glass_target=({:.3f}, {:.3f}) bottle_hold=(r={:.3f}, z={:.3f}) "
        "cap_drop_zone=({:.3f}, {:.3f})".format(
            best.glass_target.x,
            best.glass_target.y,
            best.bottle_hold.r,
            best.bottle_hold.z,
            best.cap_drop_zone.x,
            best.cap_drop_zone.y,
        )
    )
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            rows = table.write_csv(fh)
        click.echo(f"wrote {rows} rows to {out_path}")


@main.command("serve")
@click.option("--scene", "fixtures_dir", default=None, help="Directory of fixture scenes.")
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", default=None, help="Session persistence directory.")
def cli_serve(fixtures_dir: str | None, port: int, host: str, data_dir: str | None) -> None:
    """Run the HTTP/WebSocket service."""
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=data_dir, fixtures_dir=fixtures_dir, config=DEFAULT_CONFIG)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
