"""Static posture model for a seated human: chain geometry, gravity load, cost.

The body is a planar three-joint chain evaluated in the vertical plane that
contains the shoulder and the reach target.  Angles are world-referenced:

* ``torso_pitch``     -- torso axis from vertical, forward lean positive;
* ``shoulder_flexion``-- upper-arm direction from hanging straight down,
  measured against gravity (not against the torso);
* ``elbow_flexion``   -- forearm relative to the upper arm, 0 = straight.

With the torso upright and the arm hanging all angles are zero.  The plane's
horizontal coordinate ``r`` starts below the shoulder (the lateral shoulder
offset is folded in when a world point is converted to a ReachTarget), and
``z`` is height above the hip pivot.

Joint torques are the gradient of gravitational potential energy with
respect to the three angles.  Because the arm angles are world-referenced,
an upright torso feels no moment from a horizontally raised arm: the arm's
weight passes through the shoulder, whose lever about the hip is zero until
the torso leans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .scene import HumanModel, ImpairmentSpec

G = 9.81

SIDES = ("left", "right")

_LIMIT_TOL = 1e-9


class JointLimit(Exception):
    """Posture outside the model's joint limits."""


class Unreachable(Exception):
    """No admissible posture reaches the target."""


class SideDisabled(Exception):
    """The requested arm is disabled by the impairment."""


@dataclass(frozen=True)
class Posture:
    torso_pitch: float
    shoulder_flexion: float
    elbow_flexion: float
    side: str


@dataclass(frozen=True)
class TorqueVector:
    torso: float
    shoulder: float
    elbow: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.torso, self.shoulder, self.elbow)


@dataclass(frozen=True)
class ReachTarget:
    """Hand goal in the reach plane: r forward of the shoulder line, z above hip."""

    r: float
    z: float

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("reach target r must be >= 0")


@dataclass(frozen=True)
class FkResult:
    shoulder: tuple[float, float]
    elbow: tuple[float, float]
    hand: tuple[float, float]
    com_torso: tuple[float, float]
    com_upper_arm: tuple[float, float]
    com_forearm: tuple[float, float]


def _check_limits(model: HumanModel, posture: Posture) -> None:
    jl = model.joint_limits
    checks = (
        ("torso_pitch", posture.torso_pitch, jl.torso_pitch),
        ("shoulder_flexion", posture.shoulder_flexion, jl.shoulder_flexion),
        ("elbow_flexion", posture.elbow_flexion, jl.elbow_flexion),
    )
    for name, value, (lo, hi) in checks:
        if value < lo - _LIMIT_TOL or value > hi + _LIMIT_TOL:
            raise JointLimit(f"{name}={value:.6f} outside [{lo:.6f}, {hi:.6f}]")


def forward_kinematics(model: HumanModel, posture: Posture) -> FkResult:
    """Joint and center-of-mass positions in the reach plane."""
    _check_limits(model, posture)
    a0 = posture.torso_pitch
    a1 = posture.shoulder_flexion
    a12 = posture.shoulder_flexion + posture.elbow_flexion
    l0, l1, l2 = model.torso_length, model.upper_arm_length, model.forearm_length

    shoulder = (l0 * math.sin(a0), l0 * math.cos(a0))
    elbow = (shoulder[0] + l1 * math.sin(a1), shoulder[1] - l1 * math.cos(a1))
    hand = (elbow[0] + l2 * math.sin(a12), elbow[1] - l2 * math.cos(a12))
    return FkResult(
        shoulder=shoulder,
        elbow=elbow,
        hand=hand,
        com_torso=(0.5 * l0 * math.sin(a0), 0.5 * l0 * math.cos(a0)),
        com_upper_arm=(shoulder[0] + 0.5 * l1 * math.sin(a1), shoulder[1] - 0.5 * l1 * math.cos(a1)),
        com_forearm=(elbow[0] + 0.5 * l2 * math.sin(a12), elbow[1] - 0.5 * l2 * math.cos(a12)),
    )


def potential_energy(model: HumanModel, posture: Posture, held_mass: float = 0.0) -> float:
    """Gravitational potential energy of the chain plus any held point mass."""
    fk = forward_kinematics(model, posture)
    return G * (
        model.torso_mass * fk.com_torso[1]
        + model.upper_arm_mass * fk.com_upper_arm[1]
        + model.forearm_mass * fk.com_forearm[1]
        + held_mass * fk.hand[1]
    )


def gravity_torques(model: HumanModel, posture: Posture, held_mass: float = 0.0) -> TorqueVector:
    """Static joint torques: the gradient of potential energy w.r.t. the angles."""
    _check_limits(model, posture)
    l0, l1, l2 = model.torso_length, model.upper_arm_length, model.forearm_length
    m0, m1, m2 = model.torso_mass, model.upper_arm_mass, model.forearm_mass
    s0 = math.sin(posture.torso_pitch)
    s1 = math.sin(posture.shoulder_flexion)
    s12 = math.sin(posture.shoulder_flexion + posture.elbow_flexion)

    tau0 = -G * l0 * s0 * (0.5 * m0 + m1 + m2 + held_mass)
    tau1 = G * (
        m1 * 0.5 * l1 * s1
        + m2 * (l1 * s1 + 0.5 * l2 * s12)
        + held_mass * (l1 * s1 + l2 * s12)
    )
    tau2 = G * (0.5 * m2 + held_mass) * l2 * s12
    return TorqueVector(tau0, tau1, tau2)


def posture_cost(model: HumanModel, posture: Posture, held_mass: float = 0.0) -> float:
    """Sum of squared torque-to-limit ratios; zero only for a torque-free posture."""
    tau = gravity_torques(model, posture, held_mass)
    lim = model.torque_limits
    return (tau.torso / lim[0]) ** 2 + (tau.shoulder / lim[1]) ** 2 + (tau.elbow / lim[2]) ** 2


# ---------------------------------------------------------------------------
# redundancy resolution
# ---------------------------------------------------------------------------

def torso_scan_grid(model: HumanModel, impairment: ImpairmentSpec, step_deg: float) -> list[float]:
    """Torso-pitch candidates in radians: a uniform degree lattice plus the cap."""
    lo = model.joint_limits.torso_pitch[0]
    hi = min(model.joint_limits.torso_pitch[1], impairment.max_torso_lean)
    if hi < lo:
        return []
    lo_deg = math.degrees(lo)
    hi_deg = math.degrees(hi)
    n = int(math.floor((hi_deg - lo_deg) / step_deg + 1e-9))
    vals = [lo_deg + k * step_deg for k in range(n + 1)]
    if vals[-1] < hi_deg - 1e-9:
        vals.append(hi_deg)
    return [math.radians(v) for v in vals]


def _candidate_costs(
    model: HumanModel,
    impairment: ImpairmentSpec,
    target: ReachTarget,
    held_mass: float,
    theta0: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized elbow-down IK over a torso-pitch grid.

    Returns (ok, theta1, theta2, cost) arrays aligned with theta0.
    """
    l0, l1, l2 = model.torso_length, model.upper_arm_length, model.forearm_length
    m0, m1, m2 = model.torso_mass, model.upper_arm_mass, model.forearm_mass
    jl = model.joint_limits

    dr = target.r - l0 * np.sin(theta0)
    dz = target.z - l0 * np.cos(theta0)
    d2 = dr * dr + dz * dz
    d = np.sqrt(d2)

    reach_max = (l1 + l2) * impairment.reach_scale
    ok = (d <= reach_max) & (d >= abs(l1 - l2)) & (d > 1e-9)

    d_safe = np.where(ok, d, 1.0)
    cos_beta = np.clip((l1 * l1 + l2 * l2 - d2) / (2.0 * l1 * l2), -1.0, 1.0)
    theta2 = math.pi - np.arccos(cos_beta)
    cos_gamma = np.clip((l1 * l1 + d2 - l2 * l2) / (2.0 * l1 * d_safe), -1.0, 1.0)
    gamma = np.arccos(cos_gamma)
    psi = np.arctan2(dr, -dz)
    theta1 = psi - gamma

    ok &= (theta1 >= jl.shoulder_flexion[0] - _LIMIT_TOL) & (theta1 <= jl.shoulder_flexion[1] + _LIMIT_TOL)
    ok &= (theta2 >= jl.elbow_flexion[0] - _LIMIT_TOL) & (theta2 <= jl.elbow_flexion[1] + _LIMIT_TOL)

    s0 = np.sin(theta0)
    s1 = np.sin(theta1)
    s12 = np.sin(theta1 + theta2)
    tau0 = -G * l0 * s0 * (0.5 * m0 + m1 + m2 + held_mass)
    tau1 = G * (m1 * 0.5 * l1 * s1 + m2 * (l1 * s1 + 0.5 * l2 * s12) + held_mass * (l1 * s1 + l2 * s12))
    tau2 = G * (0.5 * m2 + held_mass) * l2 * s12
    lim = model.torque_limits
    cost = (tau0 / lim[0]) ** 2 + (tau1 / lim[1]) ** 2 + (tau2 / lim[2]) ** 2
    return ok, theta1, theta2, cost


def solve_posture(
    model: HumanModel,
    impairment: ImpairmentSpec,
    target: ReachTarget,
    side: str,
    held_mass: float = 0.0,
    scan_step_deg: float = 0.25,
) -> Posture:
    """Minimum-cost admissible posture reaching the target with the given arm.

    Scans torso pitch on a fixed degree lattice, closes each candidate with
    analytic elbow-down arm IK, and keeps the cheapest posture, breaking
    ties toward the smallest torso lean.  Raises SideDisabled for an arm the
    impairment rules out and Unreachable when no candidate is admissible.
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    if not impairment.side_usable(side):
        raise SideDisabled(f"{side} arm is disabled")

    grid = torso_scan_grid(model, impairment, scan_step_deg)
    if not grid:
        raise Unreachable("empty torso-pitch range")
    theta0 = np.asarray(grid)
    ok, theta1, theta2, cost = _candidate_costs(model, impairment, target, held_mass, theta0)
    if not bool(ok.any()):
        raise Unreachable(f"target r={target.r:.3f} z={target.z:.3f} beyond {side} arm")
    cost = np.where(ok, cost, np.inf)
    best = int(np.argmin(cost))  # first minimum = smallest torso pitch
    return Posture(float(theta0[best]), float(theta1[best]), float(theta2[best]), side)


def reach_feasible(
    model: HumanModel,
    impairment: ImpairmentSpec,
    target: ReachTarget,
    side: str,
    held_mass: float = 0.0,
) -> bool:
    """True iff solve_posture succeeds; never raises."""
    try:
        solve_posture(model, impairment, target, side, held_mass)
    except (SideDisabled, Unreachable):
        return False
    return True


# ---------------------------------------------------------------------------
# world-to-plane conversion
# ---------------------------------------------------------------------------

def shoulder_ground_point(model: HumanModel, side: str) -> tuple[float, float]:
    """Table-frame point directly below the shoulder of the given side."""
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    hip = model.hip_anchor
    sign = 1.0 if side == "right" else -1.0
    right = (math.cos(hip.yaw), math.sin(hip.yaw))
    return (
        hip.x + sign * model.shoulder_lateral_offset * right[0],
        hip.y + sign * model.shoulder_lateral_offset * right[1],
    )


def facing_direction(model: HumanModel) -> tuple[float, float]:
    """Unit vector the seated human faces (toward the table at yaw 0)."""
    hip = model.hip_anchor
    return (-math.sin(hip.yaw), math.cos(hip.yaw))


def reach_target_for(
    model: HumanModel, side: str, point_xy: tuple[float, float], z: float
) -> ReachTarget:
    """Convert a table-frame point plus height into the arm's reach plane.

    The lateral shoulder offset is folded in here: r is the horizontal
    distance from the shoulder's ground projection to the point.
    """
    gx, gy = shoulder_ground_point(model, side)
    return ReachTarget(r=math.hypot(point_xy[0] - gx, point_xy[1] - gy), z=z)
