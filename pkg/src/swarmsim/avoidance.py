"""Reactive inter-agent collision avoidance.

Each neighbor closer than ``b`` contributes a deflection perpendicular to
the separation vector r, built from the cross product of r with one of two
fixed auxiliary axes; the axis is chosen by comparing |r.n1| and |r.n2| so
the cross product can never degenerate to zero for r != 0.  Term magnitude
ramps linearly from ``kp`` at contact down to zero at range ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import saturate

_N1 = np.array([1.0, 0.0, 0.0])
_N2 = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class AvoidanceConfig:
    b: float = 3.0  # trigger range, meters
    kp: float = 1.0  # deflection scale, m/s
    enabled: bool = True
    # Selects the axis by signed comparison r.n1 < r.n2 instead of the
    # absolute-value comparison.  The signed branch picks n1 for r along
    # -x, where r x n1 = 0 and the term is dropped; kept only for
    # side-by-side experiments.
    literal_branch: bool = False

    def __post_init__(self):
        if self.b <= 0 or self.kp <= 0:
            raise ValueError("b and kp must be positive")


@dataclass(frozen=True)
class AvoidanceVector:
    a: np.ndarray  # (3,), m/s
    skipped: tuple[int, ...] = ()  # neighbor ids whose term degenerated


def avoidance_vector(
    reports: list[tuple[int, np.ndarray]],
    config: AvoidanceConfig,
) -> AvoidanceVector:
    """Sum of deflection terms over in-range neighbors.

    ``reports`` are (neighbor id, r) pairs with r pointing from this agent
    toward the neighbor; callers pre-filter to |r| <= b.  A coincident
    neighbor (r = 0) cannot define a deflection plane: its term is skipped
    and the id returned so the engine can log the contact.
    """
    a = np.zeros(3)
    skipped: list[int] = []
    for neighbor, r in reports:
        r = np.asarray(r, dtype=float)
        dist = float(np.linalg.norm(r))
        if dist == 0.0:
            skipped.append(neighbor)
            continue
        if dist > config.b:
            continue
        if config.literal_branch:
            pick_n1 = float(r @ _N1) < float(r @ _N2)
        else:
            pick_n1 = abs(float(r @ _N1)) < abs(float(r @ _N2))
        axis = _N1 if pick_n1 else _N2
        cross = np.cross(r, axis)
        norm = float(np.linalg.norm(cross))
        if norm == 0.0:
            # only reachable in literal-branch mode (r along -x)
            skipped.append(neighbor)
            continue
        a = a + config.kp * (1.0 - dist / config.b) * (cross / norm)
    return AvoidanceVector(a=a, skipped=tuple(skipped))


def compose_velocity(u_consensus: np.ndarray, a: AvoidanceVector | np.ndarray, v_max: float) -> np.ndarray:
    """Final desired velocity: consensus plus avoidance, then saturation."""
    term = a.a if isinstance(a, AvoidanceVector) else np.asarray(a, dtype=float)
    return saturate(np.asarray(u_consensus, dtype=float) + term, v_max)
