"""Deterministic lockstep multi-UAV swarm simulator.

Layers: a topology-gated message bus, first-order agent dynamics, a
consensus formation controller, Hungarian formation reconfiguration,
reactive collision avoidance, a cooperative-search mission, a replayable
telemetry log, and a CLI plus WebSocket gateway for live operation.
"""

from .assignment import Assignment, CostMatrix, build_cost_matrix, reconfigure, solve, solve_max
from .avoidance import AvoidanceConfig, AvoidanceVector, avoidance_vector, compose_velocity
from .bus import RelativePositionReport, TopicMessage, audit, gate, relative_positions
from .dynamics import AgentState, VelocityCommand, integrate, saturate
from .engine import PHASES, Engine, RunContext, SimClock, SwarmCommand, WorldState, run_scenario, step
from .errors import ReplayRefused, ScenarioError, SimulationHalt, SwarmSimError
from .events import SimEvent
from .formation import (
    FormationError,
    FormationSpec,
    builtin_formations,
    consensus_velocity,
    formation_error,
)
from .scenario import ScenarioConfig, build_context, load_command_script, load_scenario
from .search import (
    Cell,
    DetectionReport,
    SearchPlan,
    SearchRegion,
    build_search_plan,
    decompose,
    detect,
    lawnmower,
    track_waypoints,
)
from .telemetry import ReplayReport, TelemetryLog, export_curves, replay
from .topology import LeaderDesignation, TopologyMatrix, chain_topology, six_uav_example, validate

__version__ = "0.1.0"

__all__ = [
    "AgentState", "Assignment", "AvoidanceConfig", "AvoidanceVector", "Cell",
    "CostMatrix", "DetectionReport", "Engine", "FormationError", "FormationSpec",
    "LeaderDesignation", "PHASES", "RelativePositionReport", "ReplayRefused",
    "ReplayReport", "RunContext", "ScenarioConfig", "ScenarioError", "SearchPlan",
    "SearchRegion", "SimClock", "SimEvent", "SimulationHalt", "SwarmCommand",
    "SwarmSimError", "TelemetryLog",
    "TopicMessage", "TopologyMatrix", "VelocityCommand", "WorldState", "audit",
    "avoidance_vector", "build_context", "build_cost_matrix", "build_search_plan",
    "builtin_formations", "chain_topology", "compose_velocity", "consensus_velocity",
    "decompose", "detect", "export_curves", "formation_error", "gate", "integrate",
    "lawnmower", "load_command_script", "load_scenario", "reconfigure",
    "relative_positions", "replay", "run_scenario", "saturate", "six_uav_example",
    "solve", "solve_max", "step", "track_waypoints", "validate",
]
