"""Exception types shared across the simulator."""

from __future__ import annotations


class SwarmSimError(Exception):
    pass


class SimulationHalt(SwarmSimError):
    """Raised when the engine detects a corrupt state and must stop."""

    def __init__(self, agent: int | None, phase: str, detail: str):
        self.agent = agent
        self.phase = phase
        self.detail = detail
        who = f"agent {agent}" if agent is not None else "world"
        super().__init__(f"simulation halted in phase {phase} ({who}): {detail}")


class ScenarioError(SwarmSimError):
    """Scenario file failed to parse or validate; carries all violations."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("invalid scenario:\n  " + "\n  ".join(violations))


class ReplayRefused(SwarmSimError):
    pass
