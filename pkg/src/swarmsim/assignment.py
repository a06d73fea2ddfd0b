"""Formation reconfiguration as minimum-cost assignment.

The leader matches follower positions (in its own frame) to the follower
slots of the target formation so that total travel distance is minimal,
then broadcasts the slot mapping.  The solver is the O(n^3) Hungarian
algorithm in its shortest-augmenting-path form; rows are processed and
columns scanned in index order, so ties always resolve toward the lowest
follower index and results are identical across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import AgentState
from .formation import FormationSpec
from .topology import LeaderDesignation


@dataclass(frozen=True)
class CostMatrix:
    c: np.ndarray  # (n, n), meters

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"cost matrix must be square, got {c.shape}")
        if c.size and (not np.all(np.isfinite(c)) or np.any(c < 0.0)):
            raise ValueError("cost entries must be finite and non-negative")
        c.flags.writeable = False
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.shape[0]


@dataclass(frozen=True)
class Assignment:
    permutation: tuple[int, ...]  # slot index per row
    total_cost: float


def _hungarian(c: np.ndarray) -> tuple[np.ndarray, float]:
    """Min-cost perfect matching on a square matrix (any finite costs).

    Index 0 of the potential/matching arrays is a virtual column; rows and
    columns are 1-based internally.
    """
    n = c.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int), 0.0
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    match = np.zeros(n + 1, dtype=int)  # match[j] = row assigned to column j
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            free = np.nonzero(~used[1:])[0] + 1
            reduced = c[i0 - 1, free - 1] - u[i0] - v[free]
            better = reduced < minv[free]
            minv[free] = np.where(better, reduced, minv[free])
            way[free[better]] = j0
            k = int(np.argmin(minv[free]))  # first minimum: lowest column wins ties
            delta = float(minv[free][k])
            j1 = int(free[k])
            u[match[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0 != 0:
            j1 = int(way[j0])
            match[j0] = match[j1]
            j0 = j1
    perm = np.zeros(n, dtype=int)
    for j in range(1, n + 1):
        perm[match[j] - 1] = j - 1
    total = float(c[np.arange(n), perm].sum())
    return perm, total


def solve(cost: CostMatrix) -> Assignment:
    """Optimal (not approximate) min-cost assignment."""
    perm, total = _hungarian(cost.c)
    return Assignment(permutation=tuple(int(x) for x in perm), total_cost=total)


def solve_max(weights: np.ndarray) -> Assignment:
    """Maximum-total-weight assignment (the negated-distance formulation).

    Equivalent to :func:`solve` on the negated matrix; provided so the
    equivalence can be asserted rather than assumed.
    """
    w = np.asarray(weights, dtype=float)
    perm, _ = _hungarian(-w)
    total = float(w[np.arange(w.shape[0]), perm].sum()) if w.size else 0.0
    return Assignment(permutation=tuple(int(x) for x in perm), total_cost=total)


def build_cost_matrix(
    states: list[AgentState],
    leader: LeaderDesignation,
    target: FormationSpec,
) -> CostMatrix:
    """Distances from follower positions (leader frame) to follower slots.

    The leader is pinned to slot 0 and excluded; using leader-relative
    coordinates makes the assignment invariant under swarm translation.
    """
    lead = leader.leader_index
    origin = states[lead].position
    followers = [s for s in states if s.id != lead]
    slots = target.offsets[1:]
    n = len(followers)
    c = np.zeros((n, n))
    for a, s in enumerate(followers):
        rel = s.position - origin
        c[a] = np.linalg.norm(slots - rel, axis=1)
    return CostMatrix(c)


@dataclass(frozen=True)
class SlotMapping:
    """Broadcast payload: each follower's new slot and offset."""

    formation: str
    entries: tuple[tuple[int, int, tuple[float, float, float]], ...]  # (agent, slot, delta)
    total_cost: float

    def delta_table(self, n: int, leader_index: int) -> np.ndarray:
        deltas = np.zeros((n, 3))
        for agent, _slot, delta in self.entries:
            deltas[agent] = delta
        deltas[leader_index] = 0.0
        return deltas


def reconfigure(
    current: FormationSpec | None,
    target: FormationSpec,
    states: list[AgentState],
    leader: LeaderDesignation = LeaderDesignation(0),
) -> SlotMapping:
    """Leader-side formation switch: solve the assignment and produce the
    slot-mapping broadcast.  Raises ValueError on an agent-count mismatch
    (callers reject the command and leave the formation unchanged)."""
    if target.n != len(states):
        raise ValueError(
            f"formation {target.name!r} has {target.n} slots but swarm has {len(states)} agents"
        )
    cost = build_cost_matrix(states, leader, target)
    sol = solve(cost)
    lead = leader.leader_index
    follower_ids = [s.id for s in states if s.id != lead]
    entries = []
    for a, agent in enumerate(follower_ids):
        slot = sol.permutation[a] + 1  # cost matrix excludes slot 0
        delta = target.offsets[slot]
        entries.append((agent, slot, (float(delta[0]), float(delta[1]), float(delta[2]))))
    return SlotMapping(formation=target.name, entries=tuple(entries), total_cost=sol.total_cost)
