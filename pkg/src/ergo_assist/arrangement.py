"""Arrangement search: where should objects go so the human stays comfortable.

The decision variables are the glass target cell, the bottle-hold pose used
while the cap comes off, and the cap drop zone.  The production optimizer
and the exhaustive reference search share one candidate generator and one
per-candidate cost table, so their objectives are bit-identical; they differ
in how they search (masked vectorized argmin versus plain nested loops).

The objective sums, over the task's key-frames, the posture cost of every
usable-arm hand target whose slot depends on the arrangement.  Support
targets for the second hand are deliberately excluded: they are robot work
whenever the second arm is unavailable, and they enter baseline prediction
and step costing instead.  Keeping the objective's term structure identical
across impairments is what makes "a disabled arm never lowers the optimal
cost" a theorem rather than a hope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, TextIO

import numpy as np

from .config import DEFAULT_CONFIG, PlannerConfig
from .ergonomics import (
    ReachTarget,
    SideDisabled,
    Unreachable,
    facing_direction,
    posture_cost,
    reach_target_for,
    shoulder_ground_point,
    solve_posture,
    torso_scan_grid,
)
from .scene import DETACH_OFFSET, Pose2D, Scene
from .tasks import ARRANGEMENT_SLOTS, ROLES, KeyFrame, TaskTemplate


class NoFeasibleArrangement(Exception):
    """No candidate combination satisfies every key-frame and constraint."""

    def __init__(self, message: str, blocking: tuple[str, ...] = ()) -> None:
        super().__init__(message)
        self.blocking = blocking


@dataclass(frozen=True)
class Infeasible:
    """Sentinel cost value naming the constraint that failed."""

    reason: str


@dataclass(frozen=True)
class Arrangement:
    glass_target: Pose2D
    bottle_hold: ReachTarget
    cap_drop_zone: Pose2D


_SLOT_OBJECT = {
    "bottle_current": "bottle",
    "bottle_hold": "bottle",
    "cap_at_hold": "cap",
    "cap_drop": "cap",
    "pour_above_glass": "glass",
    "glass_final": "glass",
}


def usable_sides(scene: Scene) -> tuple[str, ...]:
    """Arms the human may use, dominant (right) side first."""
    disabled = scene.impairment.disabled_side
    if disabled == "none":
        return ("right", "left")
    return ("left",) if disabled == "right" else ("right",)


def anchor_side(scene: Scene) -> str:
    """Side whose sagittal ray anchors bottle-hold candidates."""
    return usable_sides(scene)[0]


def hold_world_point(scene: Scene, hold: ReachTarget) -> tuple[float, float]:
    """Table-frame point of a bottle-hold pose.

    Hold poses live on the sagittal ray of the anchor shoulder: straight
    ahead of the user at distance r.
    """
    gx, gy = shoulder_ground_point(scene.human, anchor_side(scene))
    fx, fy = facing_direction(scene.human)
    return (gx + hold.r * fx, gy + hold.r * fy)


def resolve_slot(
    scene: Scene, arrangement: Arrangement, slot: str, config: PlannerConfig = DEFAULT_CONFIG
) -> tuple[tuple[float, float], float]:
    """Map a slot name to (table-frame point, height above hip)."""
    top = scene.table.top_height
    if slot == "bottle_current":
        bottle = scene.object_of_kind("bottle")
        return (bottle.pose.x, bottle.pose.y), top + bottle.grasp_height
    if slot == "bottle_hold":
        return hold_world_point(scene, arrangement.bottle_hold), arrangement.bottle_hold.z
    if slot == "cap_at_hold":
        point = hold_world_point(scene, arrangement.bottle_hold)
        return point, arrangement.bottle_hold.z + config.cap_on_bottle_dz
    if slot == "cap_drop":
        cap = scene.object_of_kind("cap")
        return (arrangement.cap_drop_zone.x, arrangement.cap_drop_zone.y), top + cap.grasp_height
    if slot == "pour_above_glass":
        glass = scene.object_of_kind("glass")
        target = arrangement.glass_target
        return (target.x, target.y), top + glass.grasp_height + config.pour_clearance
    if slot == "glass_final":
        glass = scene.object_of_kind("glass")
        target = arrangement.glass_target
        return (target.x, target.y), top + glass.grasp_height
    raise ValueError(f"unknown slot {slot!r}")


def identity_arrangement(scene: Scene, config: PlannerConfig = DEFAULT_CONFIG) -> Arrangement:
    """The arrangement implied by leaving every object where it stands.

    The bottle hold is the bottle's current distance and grasp height, the
    cap drop zone is where a detach would put the cap, and the glass target
    is the glass itself.
    """
    bottle = scene.object_of_kind("bottle")
    glass = scene.object_of_kind("glass")
    gx, gy = shoulder_ground_point(scene.human, anchor_side(scene))
    hold = ReachTarget(
        r=math.hypot(bottle.pose.x - gx, bottle.pose.y - gy),
        z=scene.table.top_height + bottle.grasp_height,
    )
    drop = Pose2D(bottle.pose.x + DETACH_OFFSET[0], bottle.pose.y + DETACH_OFFSET[1], 0.0)
    return Arrangement(glass_target=glass.pose, bottle_hold=hold, cap_drop_zone=drop)


def _held_mass(scene: Scene, held_object: str | None) -> float:
    if held_object is None:
        return 0.0
    return scene.object_of_kind(held_object).mass


def _side_cost(
    scene: Scene, point: tuple[float, float], z: float, side: str, held_mass: float
) -> float | None:
    try:
        target = reach_target_for(scene.human, side, point, z)
        posture = solve_posture(scene.human, scene.impairment, target, side, held_mass)
    except (Unreachable, SideDisabled):
        return None
    return posture_cost(scene.human, posture, held_mass)


def _best_usable_cost(
    scene: Scene, point: tuple[float, float], z: float, held_mass: float
) -> float | None:
    best: float | None = None
    for side in usable_sides(scene):
        cost = _side_cost(scene, point, z, side, held_mass)
        if cost is not None and (best is None or cost < best):
            best = cost
    return best


def keyframe_cost(
    scene: Scene,
    arrangement: Arrangement,
    key_frame: KeyFrame,
    config: PlannerConfig = DEFAULT_CONFIG,
    human_roles: tuple[str, ...] = ROLES,
) -> float | Infeasible:
    """Human posture cost of one key-frame under an arrangement.

    By default every hand target is assigned to the human (the unaided
    reading).  `human_roles` restricts which target roles the human covers;
    targets outside it are someone else's problem (robot support) and cost
    nothing here.  A key-frame with no human targets costs zero.
    Two-handed key-frames evaluate both arm assignments and keep the
    cheaper one; with one arm disabled they are infeasible.
    """
    targets = [t for t in key_frame.actor_hand_targets if t.role in human_roles]
    if not targets:
        return 0.0

    resolved = [
        (t, *resolve_slot(scene, arrangement, t.slot, config), _held_mass(scene, t.held_object))
        for t in targets
    ]
    sides = usable_sides(scene)

    usable_targets = [(t, p, z, m) for t, p, z, m in resolved if t.role == "usable"]
    other_targets = [(t, p, z, m) for t, p, z, m in resolved if t.role == "other"]

    if not other_targets:
        total = 0.0
        for t, point, z, mass in usable_targets:
            cost = _best_usable_cost(scene, point, z, mass)
            if cost is None:
                return Infeasible(f"reach: {_SLOT_OBJECT[t.slot]}")
            total += cost
        return total

    # Two-handed key-frame: one usable-role and one other-role target.
    if len(sides) < 2:
        disabled = scene.impairment.disabled_side
        return Infeasible(f"arm: {disabled} disabled")
    (tu, pu, zu, mu) = usable_targets[0]
    (to, po, zo, mo) = other_targets[0]
    best: float | None = None
    for s_usable, s_other in ((sides[0], sides[1]), (sides[1], sides[0])):
        cu = _side_cost(scene, pu, zu, s_usable, mu)
        co = _side_cost(scene, po, zo, s_other, mo)
        if cu is None or co is None:
            continue
        pair = cu + co
        if best is None or pair < best:
            best = pair
    if best is None:
        return Infeasible(f"reach: {_SLOT_OBJECT[to.slot]}")
    return best


# ---------------------------------------------------------------------------
# candidate generation (shared by both search routes)
# ---------------------------------------------------------------------------

@dataclass
class CandidateSets:
    """Per-variable candidates with frozen costs and positions."""

    # glass target cells
    glass_xy: np.ndarray      # (G, 2)
    glass_yaw: float
    glass_cost: np.ndarray    # (G,) weighted pour + pick cost
    glass_disp: np.ndarray    # (G,) displacement from the current glass pose
    # cap drop cells
    cap_xy: np.ndarray        # (C, 2)
    cap_cost: np.ndarray      # (C,) weighted cost
    # bottle hold poses
    hold_rz: np.ndarray       # (H, 2) ReachTarget (r, z)
    hold_xy: np.ndarray       # (H, 2) table-frame point (also the put-down spot)
    hold_cost: np.ndarray     # (H,) weighted cost
    grid_step: float

    @property
    def counts(self) -> tuple[int, int, int]:
        return (len(self.glass_cost), len(self.cap_cost), len(self.hold_cost))


def _lattice(step: float, half_x: float, half_y: float) -> Iterator[tuple[float, float]]:
    nx = int(math.floor(half_x / step + 1e-9))
    ny = int(math.floor(half_y / step + 1e-9))
    for kx in range(-nx, nx + 1):
        for ky in range(-ny, ny + 1):
            yield (kx * step, ky * step)


def _reach_radius_bound(scene: Scene, z: float) -> float:
    """Upper bound on horizontal reach at height z (used only to prune)."""
    h = scene.human
    reach = (h.upper_arm_length + h.forearm_length) * scene.impairment.reach_scale
    best = 0.0
    for theta0 in torso_scan_grid(h, scene.impairment, 1.0):
        dz = z - h.torso_length * math.cos(theta0)
        horiz2 = reach * reach - dz * dz
        if horiz2 <= 0.0:
            continue
        best = max(best, h.torso_length * math.sin(theta0) + math.sqrt(horiz2))
    return best + 1e-6


def build_candidates(
    scene: Scene,
    task: TaskTemplate,
    grid_step: float,
    config: PlannerConfig = DEFAULT_CONFIG,
) -> CandidateSets:
    """Enumerate and cost all per-variable candidates on the given grid.

    Candidate positions are lattice points anchored at the table center,
    plus the "leave it where it is" pose of each variable so that keeping
    the current placement is always on the table when it is admissible.
    """
    table = scene.table
    ws = scene.robot_workspace
    glass = scene.object_of_kind("glass")
    cap = scene.object_of_kind("cap")
    identity = identity_arrangement(scene, config)

    # Weight and held mass of each arrangement-dependent usable-arm target,
    # read off the task template.
    weight: dict[str, float] = {}
    held: dict[str, float] = {}
    for kf in task.key_frames:
        for t in kf.actor_hand_targets:
            if t.role == "usable" and t.slot in ARRANGEMENT_SLOTS:
                weight[t.slot] = config.keyframe_weights[kf.step_id - 1]
                held[t.slot] = _held_mass(scene, t.held_object)
    for slot in ("pour_above_glass", "glass_final", "cap_drop", "cap_at_hold"):
        if slot not in weight:
            raise ValueError(f"task {task.name!r} has no usable-arm target for slot {slot!r}")

    z_pick = table.top_height + glass.grasp_height
    z_pour = z_pick + config.pour_clearance
    z_cap = table.top_height + cap.grasp_height

    sides = usable_sides(scene)
    grounds = {s: shoulder_ground_point(scene.human, s) for s in sides}
    r_pick = _reach_radius_bound(scene, z_pick)
    r_pour = _reach_radius_bound(scene, z_pour)
    r_cap = _reach_radius_bound(scene, z_cap)

    def within_any_reach(point: tuple[float, float], bound: float) -> bool:
        for s in sides:
            gx, gy = grounds[s]
            if math.hypot(point[0] - gx, point[1] - gy) <= bound:
                return True
        return False

    # -- glass target cells ------------------------------------------------
    glass_xy: list[tuple[float, float]] = []
    glass_cost: list[float] = []
    glass_points = list(_lattice(grid_step, table.half_extent_x, table.half_extent_y))
    glass_points.append((glass.pose.x, glass.pose.y))
    for point in glass_points:
        if not table.contains(*point) or not ws.contains(*point):
            continue
        if not (within_any_reach(point, r_pick) and within_any_reach(point, r_pour)):
            continue
        pick = _best_usable_cost(scene, point, z_pick, held["glass_final"])
        if pick is None:
            continue
        pour = _best_usable_cost(scene, point, z_pour, held["pour_above_glass"])
        if pour is None:
            continue
        glass_xy.append(point)
        glass_cost.append(weight["pour_above_glass"] * pour + weight["glass_final"] * pick)

    # -- cap drop cells ----------------------------------------------------
    cap_xy: list[tuple[float, float]] = []
    cap_cost: list[float] = []
    cap_points = list(_lattice(grid_step, table.half_extent_x, table.half_extent_y))
    identity_drop = (identity.cap_drop_zone.x, identity.cap_drop_zone.y)
    if table.contains(*identity_drop):
        cap_points.append(identity_drop)
    for point in cap_points:
        if not table.contains(*point):
            continue
        if not within_any_reach(point, r_cap):
            continue
        cost = _best_usable_cost(scene, point, z_cap, held["cap_drop"])
        if cost is None:
            continue
        cap_xy.append(point)
        cap_cost.append(weight["cap_drop"] * cost)

    # -- bottle hold poses ---------------------------------------------------
    h = scene.human
    anchor = anchor_side(scene)
    agx, agy = grounds[anchor]
    fx, fy = facing_direction(h)
    reach = (h.upper_arm_length + h.forearm_length) * scene.impairment.reach_scale
    n_r = int(math.floor((reach - config.hold_radius_min) / grid_step + 1e-9))
    n_a = int(math.floor((config.hold_angle_max_deg - config.hold_angle_min_deg) / config.hold_angle_step_deg + 1e-9))
    hold_candidates: list[tuple[float, float]] = []
    for kr in range(n_r + 1):
        rho = config.hold_radius_min + kr * grid_step
        for ka in range(n_a + 1):
            phi = math.radians(config.hold_angle_min_deg + ka * config.hold_angle_step_deg)
            r = rho * math.cos(phi)
            z = h.torso_length + rho * math.sin(phi)
            if r < 0.0 or z <= table.top_height:
                continue
            hold_candidates.append((r, z))
    hold_candidates.append((identity.bottle_hold.r, identity.bottle_hold.z))

    hold_rz: list[tuple[float, float]] = []
    hold_xy: list[tuple[float, float]] = []
    hold_cost: list[float] = []
    for r, z in hold_candidates:
        point = (agx + r * fx, agy + r * fy)
        cost = _best_usable_cost(scene, point, z + config.cap_on_bottle_dz, held["cap_at_hold"])
        if cost is None:
            continue
        hold_rz.append((r, z))
        hold_xy.append(point)
        hold_cost.append(weight["cap_at_hold"] * cost)

    gxy = np.asarray(glass_xy, dtype=float).reshape(-1, 2)
    disp = np.hypot(gxy[:, 0] - glass.pose.x, gxy[:, 1] - glass.pose.y) if len(glass_xy) else np.zeros(0)
    return CandidateSets(
        glass_xy=gxy,
        glass_yaw=glass.pose.yaw,
        glass_cost=np.asarray(glass_cost, dtype=float),
        glass_disp=disp,
        cap_xy=np.asarray(cap_xy, dtype=float).reshape(-1, 2),
        cap_cost=np.asarray(cap_cost, dtype=float),
        hold_rz=np.asarray(hold_rz, dtype=float).reshape(-1, 2),
        hold_xy=np.asarray(hold_xy, dtype=float).reshape(-1, 2),
        hold_cost=np.asarray(hold_cost, dtype=float),
        grid_step=grid_step,
    )


def _raise_if_empty(cands: CandidateSets) -> None:
    blocking: list[str] = []
    if len(cands.glass_cost) == 0:
        blocking.append("key-frames 4-5 (pour, pick up glass): no reachable glass cell in table and robot workspace")
    if len(cands.cap_cost) == 0:
        blocking.append("key-frame 3 (place cap): no reachable cap drop cell")
    if len(cands.hold_cost) == 0:
        blocking.append("key-frame 2 (remove cap): no reachable bottle hold pose")
    if blocking:
        raise NoFeasibleArrangement("; ".join(blocking), blocking=tuple(blocking))


def _tie_key(cands: CandidateSets, i: int, k: int, j: int) -> tuple[float, ...]:
    return (
        float(cands.glass_disp[i]),
        float(cands.glass_xy[i, 0]),
        float(cands.glass_xy[i, 1]),
        float(cands.hold_rz[k, 0]),
        float(cands.hold_rz[k, 1]),
        float(cands.cap_xy[j, 0]),
        float(cands.cap_xy[j, 1]),
    )


def _arrangement_from(cands: CandidateSets, i: int, k: int, j: int) -> Arrangement:
    return Arrangement(
        glass_target=Pose2D(float(cands.glass_xy[i, 0]), float(cands.glass_xy[i, 1]), cands.glass_yaw),
        bottle_hold=ReachTarget(float(cands.hold_rz[k, 0]), float(cands.hold_rz[k, 1])),
        cap_drop_zone=Pose2D(float(cands.cap_xy[j, 0]), float(cands.cap_xy[j, 1]), 0.0),
    )


def _validate_result(scene: Scene, arrangement: Arrangement, config: PlannerConfig) -> None:
    """Re-check every arrangement invariant on the way out."""
    table = scene.table
    ws = scene.robot_workspace
    g = arrangement.glass_target
    assert table.contains(g.x, g.y) and ws.contains(g.x, g.y), "glass target inside table and workspace"
    hold_pt = hold_world_point(scene, arrangement.bottle_hold)
    positions = [
        (g.x, g.y),
        (arrangement.cap_drop_zone.x, arrangement.cap_drop_zone.y),
        hold_pt,
    ]
    for a in range(len(positions)):
        for b in range(a + 1, len(positions)):
            dist = math.hypot(positions[a][0] - positions[b][0], positions[a][1] - positions[b][1])
            assert dist >= config.min_separation - 1e-12, "pairwise separation"


def optimize_arrangement(
    scene: Scene,
    task: TaskTemplate,
    config: PlannerConfig = DEFAULT_CONFIG,
    grid_step: float | None = None,
) -> Arrangement:
    """Grid search for the cheapest admissible arrangement.

    Deterministic tie-break: lexicographically smallest
    (cost, |glass_target - current glass pose|, glass x, glass y,
    hold r, hold z, cap x, cap y).
    """
    step = config.grid_step if grid_step is None else grid_step
    cands = build_candidates(scene, task, step, config)
    _raise_if_empty(cands)

    sep = config.min_separation
    gxy, cxy, hxy = cands.glass_xy, cands.cap_xy, cands.hold_xy
    # pairwise separation masks between placed objects
    m_gc = _pairwise_ok(gxy, cxy, sep)            # (G, C)
    m_gh = _pairwise_ok(gxy, hxy, sep)            # (G, H)
    m_hc = _pairwise_ok(hxy, cxy, sep)            # (H, C)

    g_cost, h_cost, c_cost = cands.glass_cost, cands.hold_cost, cands.cap_cost
    n_g, n_h, n_c = len(g_cost), len(h_cost), len(c_cost)

    best_cost = math.inf
    best_key: tuple[float, ...] | None = None
    best_idx: tuple[int, int, int] | None = None

    chunk = max(1, int(4_000_000 // max(1, n_h * n_c)))
    for start in range(0, n_g, chunk):
        stop = min(start + chunk, n_g)
        total = (g_cost[start:stop, None, None] + h_cost[None, :, None]) + c_cost[None, None, :]
        mask = m_gh[start:stop, :, None] & m_gc[start:stop, None, :] & m_hc[None, :, :]
        total = np.where(mask, total, np.inf)
        chunk_min = float(total.min()) if total.size else math.inf
        if not math.isfinite(chunk_min) or chunk_min > best_cost:
            continue
        for di, k, j in np.argwhere(total == chunk_min):
            i = start + int(di)
            key = _tie_key(cands, i, int(k), int(j))
            if chunk_min < best_cost or (best_key is not None and key < best_key):
                best_cost = chunk_min
                best_key = key
                best_idx = (i, int(k), int(j))

    if best_idx is None:
        raise NoFeasibleArrangement(
            "pairwise separation eliminates every candidate combination",
            blocking=("separation",),
        )
    arrangement = _arrangement_from(cands, *best_idx)
    _validate_result(scene, arrangement, config)
    return arrangement


def _pairwise_ok(a: np.ndarray, b: np.ndarray, sep: float) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros((len(a), len(b)), dtype=bool)
    d = np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])
    return d >= sep


# ---------------------------------------------------------------------------
# exhaustive reference search
# ---------------------------------------------------------------------------

@dataclass
class CostTable:
    """Lazy view over the full candidate-combination cost landscape."""

    cands: CandidateSets
    min_separation: float

    @property
    def size(self) -> int:
        n_g, n_c, n_h = self.cands.counts
        return n_g * n_c * n_h

    def rows(self) -> Iterator[tuple[float, float, float, float, float, float, float]]:
        """Yield (gx, gy, hold_r, hold_z, capx, capy, cost) for every triple.

        Combinations that violate pairwise separation carry an infinite cost
        so the landscape keeps its full product shape.
        """
        c = self.cands
        sep = self.min_separation
        for i in range(len(c.glass_cost)):
            gx, gy = float(c.glass_xy[i, 0]), float(c.glass_xy[i, 1])
            for k in range(len(c.hold_cost)):
                hx, hy = float(c.hold_xy[k, 0]), float(c.hold_xy[k, 1])
                gh = (c.glass_cost[i] + c.hold_cost[k])
                ok_gh = math.hypot(gx - hx, gy - hy) >= sep
                for j in range(len(c.cap_cost)):
                    cx, cy = float(c.cap_xy[j, 0]), float(c.cap_xy[j, 1])
                    ok = (
                        ok_gh
                        and math.hypot(gx - cx, gy - cy) >= sep
                        and math.hypot(hx - cx, hy - cy) >= sep
                    )
                    cost = float(gh + c.cap_cost[j]) if ok else math.inf
                    yield (
                        gx,
                        gy,
                        float(c.hold_rz[k, 0]),
                        float(c.hold_rz[k, 1]),
                        cx,
                        cy,
                        cost,
                    )

    def write_csv(self, out: TextIO) -> int:
        out.write("gx,gy,hold_r,hold_z,capx,capy,cost\n")
        n = 0
        for row in self.rows():
            out.write(",".join(repr(v) for v in row) + "\n")
            n += 1
        return n


def brute_force_arrangement(
    scene: Scene,
    task: TaskTemplate,
    grid_step: float,
    config: PlannerConfig = DEFAULT_CONFIG,
) -> tuple[Arrangement, CostTable]:
    """Exhaustive enumeration with the same objective and tie-break.

    Kept free of vectorized tricks on purpose: this is the reference the
    production optimizer is tested against.
    """
    if grid_step < 0.01:
        raise ValueError("grid_step must be at least 0.01 m")
    cands = build_candidates(scene, task, grid_step, config)
    _raise_if_empty(cands)
    table = CostTable(cands=cands, min_separation=config.min_separation)

    sep = config.min_separation
    best_cost = math.inf
    best_key: tuple[float, ...] | None = None
    best_idx: tuple[int, int, int] | None = None
    for i in range(len(cands.glass_cost)):
        gx, gy = float(cands.glass_xy[i, 0]), float(cands.glass_xy[i, 1])
        for k in range(len(cands.hold_cost)):
            hx, hy = float(cands.hold_xy[k, 0]), float(cands.hold_xy[k, 1])
            if math.hypot(gx - hx, gy - hy) < sep:
                continue
            gh = cands.glass_cost[i] + cands.hold_cost[k]
            for j in range(len(cands.cap_cost)):
                cx, cy = float(cands.cap_xy[j, 0]), float(cands.cap_xy[j, 1])
                if math.hypot(gx - cx, gy - cy) < sep or math.hypot(hx - cx, hy - cy) < sep:
                    continue
                cost = float(gh + cands.cap_cost[j])
                if cost > best_cost:
                    continue
                key = _tie_key(cands, i, k, j)
                if cost < best_cost or (best_key is not None and key < best_key):
                    best_cost = cost
                    best_key = key
                    best_idx = (i, k, j)

    if best_idx is None:
        raise NoFeasibleArrangement(
            "pairwise separation eliminates every candidate combination",
            blocking=("separation",),
        )
    arrangement = _arrangement_from(cands, *best_idx)
    _validate_result(scene, arrangement, config)
    return arrangement, table


def arrangement_total_cost(
    scene: Scene,
    task: TaskTemplate,
    arrangement: Arrangement,
    config: PlannerConfig = DEFAULT_CONFIG,
) -> float | Infeasible:
    """Objective value of an arrangement: the weighted usable-arm reach costs
    of every arrangement-dependent hand target across the task's key-frames."""
    w = config.keyframe_weights
    total = 0.0
    for kf in task.key_frames:
        for t in kf.actor_hand_targets:
            if t.role != "usable" or t.slot not in ARRANGEMENT_SLOTS:
                continue
            point, z = resolve_slot(scene, arrangement, t.slot, config)
            held = _held_mass(scene, t.held_object)
            cost = _best_usable_cost(scene, point, z, held)
            if cost is None:
                return Infeasible(f"reach: {_SLOT_OBJECT[t.slot]}")
            total += w[kf.step_id - 1] * cost
    return total
