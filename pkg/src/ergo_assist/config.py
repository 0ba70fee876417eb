"""Tunable planner and engine parameters.

Everything here is configuration with sensible defaults; values that are
part of the interaction vocabulary itself (speech lines, the comet loop
period) live next to the script compiler instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PlannerConfig:
    # arrangement search
    grid_step: float = 0.02            # m, glass target and cap drop lattice
    hold_radius_min: float = 0.10      # m, closest bottle-hold radius to the shoulder
    hold_angle_step_deg: float = 5.0   # deg, elevation step of the bottle-hold arc
    hold_angle_min_deg: float = -90.0  # deg, straight down from the shoulder
    hold_angle_max_deg: float = 45.0   # deg, above horizontal
    min_separation: float = 0.08       # m, pairwise clearance between placed objects
    keyframe_weights: tuple[float, float, float, float, float] = (1.0, 1.0, 1.0, 1.0, 1.0)

    # posture search
    torso_scan_step_deg: float = 0.25  # deg, torso-pitch scan resolution

    # allocation policy
    comfort_threshold: float = 0.5     # dimensionless posture-cost budget per step

    # hand-target geometry
    pour_clearance: float = 0.12       # m, hand height above the glass rim while pouring
    cap_on_bottle_dz: float = 0.10     # m, cap height above the bottle grasp point

    # interaction timing
    robot_action_duration: float = 3.0       # s, simulated robot step duration
    arrow_angular_velocity: float = math.pi  # rad/s, spinning-arrow rotation rate

    # geometric completion thresholds
    unscrew_min_cap_distance: float = 0.05  # m, cap this far from the bottle ends step 2
    cap_place_tolerance: float = 0.03       # m, cap this close to the drop zone ends step 3


DEFAULT_CONFIG = PlannerConfig()
