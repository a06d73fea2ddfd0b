"""Settling and overshoot analysis over exported position curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .telemetry import TelemetryLog


def curves(log: TelemetryLog, axis: str) -> tuple[np.ndarray, np.ndarray]:
    """Numeric form of the curve export: (ticks, values[ticks, agents])."""
    col = {"x": 0, "y": 1, "z": 2}[axis]
    snaps = log.by_kind("snapshot")
    ticks = np.array([e.tick for e in snaps], dtype=int)
    vals = np.array([[p[col] for p in e.payload["positions"]] for e in snaps])
    return ticks, vals


@dataclass(frozen=True)
class AgentSettling:
    agent: int
    settled_tick: int | None  # first recorded tick after which |x - target| <= tol
    overshoot_pct: float  # max excursion past target, % of commanded step


def settling_report(
    ticks: np.ndarray,
    values: np.ndarray,
    targets: np.ndarray,
    tol: float = 0.05,
) -> list[AgentSettling]:
    """Per-agent settling tick and overshoot along one axis.

    Overshoot is measured in the direction of travel (start -> target);
    agents with no commanded step along this axis report 0.
    """
    out: list[AgentSettling] = []
    n = values.shape[1]
    for i in range(n):
        series = values[:, i]
        target = float(targets[i])
        err = np.abs(series - target)
        settled: int | None = None
        outside = np.nonzero(err > tol)[0]
        if outside.size == 0:
            settled = int(ticks[0])
        elif outside[-1] + 1 < len(ticks):
            settled = int(ticks[outside[-1] + 1])
        start = float(series[0])
        step = target - start
        if step == 0.0:
            overshoot = 0.0
        else:
            excursion = float(np.max((series - target) * np.sign(step)))
            overshoot = max(0.0, excursion / abs(step)) * 100.0
        out.append(AgentSettling(agent=i, settled_tick=settled, overshoot_pct=overshoot))
    return out
