"""Consensus formation control and the library of named formation shapes.

Each formation is a list of per-slot offsets; slot 0 is the leader slot and
is pinned to the origin, so every other offset is expressed in the leader's
frame.  The follower controller drives the offset-compensated position
differences to zero using only neighbor states admitted by the topology.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .dynamics import AgentState
from .topology import TopologyMatrix

DEFAULT_D_MIN = 1.0


@dataclass(frozen=True)
class FormationSpec:
    name: str
    offsets: np.ndarray  # (n, 3), offsets[0] == (0,0,0)

    def __post_init__(self):
        off = np.asarray(self.offsets, dtype=float)
        off.flags.writeable = False
        object.__setattr__(self, "offsets", off)

    @property
    def n(self) -> int:
        return self.offsets.shape[0]

    def violations(self, d_min: float = DEFAULT_D_MIN) -> list[str]:
        out = []
        if self.offsets.ndim != 2 or self.offsets.shape[1] != 3:
            return [f"{self.name}: offsets must be an (n, 3) array"]
        if np.any(self.offsets[0] != 0.0):
            out.append(f"{self.name}: leader offset must be (0,0,0), got {self.offsets[0].tolist()}")
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                d = float(np.linalg.norm(self.offsets[i] - self.offsets[j]))
                if d < d_min:
                    out.append(f"{self.name}: slots {i} and {j} are {d:.3f} m apart (< d_min {d_min})")
        return out


@dataclass(frozen=True)
class FormationError:
    """Pairwise offset-compensated position errors; a global test metric."""

    errors: dict[tuple[int, int], float]
    max_error: float
    max_edge_error: float  # restricted to topology edges


def consensus_velocity(
    i: int,
    self_state: AgentState,
    neighbors: list[tuple[int, np.ndarray]],
    topology: TopologyMatrix,
    formation: FormationSpec,
    gain: float = 1.0,
) -> np.ndarray:
    """Velocity command for agent i from its delivered neighbor positions.

    ``formation.offsets`` must already be in per-agent order (slots applied
    through the current assignment).  Neighbor positions are one tick old;
    pairs without a report are simply absent from ``neighbors`` and their
    terms are skipped.
    """
    delta_i = formation.offsets[i]
    y_i = self_state.position - delta_i
    u = np.zeros(3)
    for j, pos_j in neighbors:
        w_ij = topology.w[i, j]
        if w_ij <= 0.0:
            continue
        u -= w_ij * (y_i - (pos_j - formation.offsets[j]))
    return gain * u


def formation_error(
    states: list[AgentState],
    formation: FormationSpec,
    topology: TopologyMatrix,
) -> FormationError:
    """All-pairs formation error; max over pairs is the convergence metric."""
    n = len(states)
    y = np.array([s.position for s in states]) - formation.offsets[:n]
    diffs = y[:, None, :] - y[None, :, :]
    norms = np.sqrt(np.einsum("ijk,ijk->ij", diffs, diffs))
    errors: dict[tuple[int, int], float] = {}
    max_edge = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            errors[(i, j)] = float(norms[i, j])
            if topology.w[i, j] > 0.0 or topology.w[j, i] > 0.0:
                max_edge = max(max_edge, float(norms[i, j]))
    max_all = float(norms.max()) if n else 0.0
    return FormationError(errors=errors, max_error=max_all, max_edge_error=max_edge)


def _load_builtin(filename: str) -> list[FormationSpec]:
    text = resources.files("swarmsim").joinpath(f"data/formations/{filename}").read_text()
    doc = json.loads(text)
    return [FormationSpec(f["name"], np.array(f["offsets"], dtype=float)) for f in doc["formations"]]


def builtin_formations(n: int) -> list[FormationSpec]:
    """Named shapes shipped with the simulator: {T, diamond} for 6 agents,
    {cube, pyramid, triangle} for 9.  Other sizes return an empty list;
    supply offsets in the scenario file instead."""
    if n == 6:
        return _load_builtin("six.json")
    if n == 9:
        return _load_builtin("nine.json")
    return []


def load_formation_file(path) -> FormationSpec:
    """Load a user formation file: ``{"name": ..., "offsets": [[x,y,z],...]}``."""
    with open(path) as fh:
        doc = json.load(fh)
    return FormationSpec(doc["name"], np.array(doc["offsets"], dtype=float))
