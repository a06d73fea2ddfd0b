"""Cooperative search mission: strip decomposition, boustrophedon sweeps,
waypoint tracking and a synthetic footprint detector.

The detector stands in for an onboard vision model: inside a circular
horizontal footprint the target registers with a fixed per-tick
probability, drawn from the engine's seeded stream so detection ticks
replay exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import AgentState, VelocityCommand


@dataclass(frozen=True)
class SearchRegion:
    origin: tuple[float, float]  # south-west corner, meters
    width: float
    height: float
    altitude: float  # sweep height

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.altitude <= 0:
            raise ValueError("region width, height and altitude must be positive")


@dataclass(frozen=True)
class Cell:
    """Axis-aligned rectangle assigned to one agent (closed boundaries)."""

    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    def contains(self, x: float, y: float, eps: float = 1e-9) -> bool:
        return self.x0 - eps <= x <= self.x1 + eps and self.y0 - eps <= y <= self.y1 + eps


@dataclass(frozen=True)
class SearchPlan:
    cells: tuple[Cell, ...]
    waypoints: tuple[tuple[tuple[float, float, float], ...], ...]  # per agent


@dataclass(frozen=True)
class DetectionReport:
    detector: int
    target_estimate: tuple[float, float, float]
    tick: int


def decompose(region: SearchRegion, n: int) -> list[Cell]:
    """Split the region into n vertical strips that tile it exactly.

    Strip edges are computed once and shared between neighbors, so the
    union telescopes back to the full region with zero overlap.
    """
    if n < 1:
        raise ValueError("need at least one agent")
    x0, y0 = region.origin
    edges = [x0 + region.width * k / n for k in range(n + 1)]
    edges[-1] = x0 + region.width
    return [Cell(edges[k], y0, edges[k + 1], y0 + region.height) for k in range(n)]


def lawnmower(cell: Cell, swath: float, altitude: float) -> list[tuple[float, float, float]]:
    """Boustrophedon waypoints covering ``cell`` at the given swath.

    Track lines run along the cell's longer side and include both
    boundary tracks, so spacing is width/(lines-1) <= swath and every
    point sits within swath/2 of a track.
    """
    if swath <= 0:
        raise ValueError("swath must be positive")
    tracks_along_y = cell.height >= cell.width
    across = cell.width if tracks_along_y else cell.height
    lines = max(2, math.ceil(across / swath) + 1)
    spacing = across / (lines - 1)
    waypoints: list[tuple[float, float, float]] = []
    for i in range(lines):
        if tracks_along_y:
            x = cell.x0 + i * spacing
            lo, hi = (cell.y0, cell.y1) if i % 2 == 0 else (cell.y1, cell.y0)
            waypoints.append((x, lo, altitude))
            waypoints.append((x, hi, altitude))
        else:
            y = cell.y0 + i * spacing
            lo, hi = (cell.x0, cell.x1) if i % 2 == 0 else (cell.x1, cell.x0)
            waypoints.append((lo, y, altitude))
            waypoints.append((hi, y, altitude))
    return waypoints


def build_search_plan(region: SearchRegion, n: int, swath: float) -> SearchPlan:
    cells = decompose(region, n)
    plans = tuple(tuple(lawnmower(c, swath, region.altitude)) for c in cells)
    return SearchPlan(cells=tuple(cells), waypoints=plans)


def track_waypoints(
    state: AgentState,
    plan: tuple[tuple[float, float, float], ...],
    accept_radius: float,
    v_max: float,
    index: int = 0,
) -> tuple[VelocityCommand, int]:
    """Velocity toward the current waypoint; returns the advanced index.

    Waypoints are accepted within ``accept_radius``; speed is capped at
    ``v_max`` and tapers with remaining distance so the agent parks on the
    final waypoint instead of orbiting it.
    """
    px, py, pz = float(state.position[0]), float(state.position[1]), float(state.position[2])
    while index < len(plan):
        wx, wy, wz = plan[index]
        if math.sqrt((wx - px) ** 2 + (wy - py) ** 2 + (wz - pz) ** 2) <= accept_radius:
            index += 1
        else:
            break
    if index >= len(plan):
        u = np.zeros(3)
    else:
        wx, wy, wz = plan[index]
        dx, dy, dz = wx - px, wy - py, wz - pz
        dist = math.sqrt(dx * dx + dy * dy + dz * dz)
        scale = min(v_max, dist) / dist
        u = np.array([dx * scale, dy * scale, dz * scale])
    return VelocityCommand(target=state.id, u_desired=u, tick_issued=-1), index


def sweep_duration_bound(plan: SearchPlan, v_max: float, slack: float = 1.25) -> float:
    """Upper bound (seconds) for one full sweep of the slowest agent's cell."""
    worst = 0.0
    for wps in plan.waypoints:
        length = 0.0
        for a, b in zip(wps, wps[1:]):
            length += float(np.linalg.norm(np.subtract(b, a)))
        worst = max(worst, length)
    return slack * worst / v_max


def detect(
    state: AgentState,
    target: np.ndarray,
    footprint_radius: float,
    p_detect: float,
    rng: np.random.Generator,
    tick: int = -1,
) -> DetectionReport | None:
    """Per-tick synthetic detection inside a circular horizontal footprint."""
    if not 0.0 < p_detect <= 1.0:
        raise ValueError("p_detect must be in (0, 1]")
    target = np.asarray(target, dtype=float)
    horizontal = math.hypot(float(state.position[0]) - float(target[0]),
                            float(state.position[1]) - float(target[1]))
    if horizontal > footprint_radius:
        return None
    if rng.random() < p_detect:
        return DetectionReport(
            detector=state.id,
            target_estimate=(float(target[0]), float(target[1]), float(target[2]) if target.shape[0] > 2 else 0.0),
            tick=tick,
        )
    return None
