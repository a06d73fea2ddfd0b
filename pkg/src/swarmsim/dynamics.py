"""First-order agent plant: velocity saturation + forward-Euler integration.

Stands in for the real low-level control stack; the commanded velocity is
tracked instantly, clipped to ``v_max``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SimulationHalt


@dataclass(frozen=True)
class AgentState:
    id: int
    position: np.ndarray  # (3,) meters
    velocity: np.ndarray  # (3,) m/s, last applied command


@dataclass(frozen=True)
class VelocityCommand:
    target: int
    u_desired: np.ndarray
    tick_issued: int


def saturate(u_desired: np.ndarray, v_max: float) -> np.ndarray:
    """Clip ``u_desired`` to magnitude ``v_max``, preserving direction.

    In-range vectors are returned unchanged (bit-identical), so the
    operation is exactly idempotent.
    """
    if v_max <= 0:
        raise ValueError("v_max must be positive")
    u = np.asarray(u_desired, dtype=float)
    norm2 = float(u @ u)
    if norm2 <= v_max * v_max:
        return u
    out = u * (v_max / np.sqrt(norm2))
    # rounding can land an ulp above v_max; nudge down until the invariant
    # holds exactly, so saturate(saturate(x)) == saturate(x) bit for bit
    while float(out @ out) > v_max * v_max:
        scale = v_max / np.sqrt(float(out @ out))
        if scale >= 1.0:
            scale = np.nextafter(1.0, 0.0)
        out = out * scale
    return out


def integrate(state: AgentState, u: np.ndarray, dt: float) -> AgentState:
    """One forward-Euler step: position += u * dt, velocity := u."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(state.position)) or not np.all(np.isfinite(u)):
        raise SimulationHalt(agent=state.id, phase="Integrate",
                             detail="non-finite position or velocity")
    return AgentState(id=state.id, position=state.position + u * dt, velocity=u)
