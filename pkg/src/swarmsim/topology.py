"""Weighted communication graphs for leader-following swarms.

Convention: ``w[i][j]`` is the weight of the directed edge j -> i, i.e.
agent i receives agent j's state iff ``w[i][j] > 0``.  Agent indices are
0-based internally; scenario files and the console display 1-based ids.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TopologyMatrix:
    """N x N non-negative weight matrix, row = receiver, column = sender."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"topology matrix must be square, got shape {w.shape}")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "_in", tuple(
            tuple(int(j) for j in np.nonzero(w[i] > 0.0)[0]) for i in range(w.shape[0])
        ))
        object.__setattr__(self, "_out", tuple(
            tuple(int(i) for i in np.nonzero(w[:, j] > 0.0)[0]) for j in range(w.shape[0])
        ))

    @property
    def n(self) -> int:
        return self.w.shape[0]

    def in_neighbors(self, i: int) -> tuple[int, ...]:
        """Agents j whose state agent i receives (w[i][j] > 0)."""
        return self._in[i]

    def out_neighbors(self, j: int) -> tuple[int, ...]:
        return self._out[j]


@dataclass(frozen=True)
class LeaderDesignation:
    leader_index: int = 0


def six_uav_example() -> TopologyMatrix:
    """The 6-agent chain topology used throughout the 6-UAV demos."""
    w = np.array(
        [
            [0, 0, 0, 0, 0, 0],
            [1, 0, 0, 0, 0, 0],
            [1, 1, 0, 0, 0, 0],
            [0, 1, 1, 0, 0, 0],
            [0, 0, 1, 1, 0, 0],
            [0, 0, 0, 1, 1, 0],
        ],
        dtype=float,
    )
    return TopologyMatrix(w)


def chain_topology(n: int, fan_in: int) -> TopologyMatrix:
    """Chain topology: agent i receives unit edges from the ``fan_in``
    agents immediately ahead of it, agent 0 is the leader.

    ``chain_topology(6, 2)`` reproduces :func:`six_uav_example`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if fan_in < 1:
        raise ValueError("fan_in must be >= 1")
    w = np.zeros((n, n))
    for i in range(1, n):
        w[i, max(0, i - fan_in) : i] = 1.0
    return TopologyMatrix(w)


def validate(topology: TopologyMatrix, leader: LeaderDesignation) -> list[str]:
    """Check all topology invariants; returns human-readable violations.

    Violations are data, not errors: an empty list means the topology is a
    valid leader-following graph (no self-edges, non-negative weights,
    all-zero leader row, every follower reachable from the leader).
    """
    w = topology.w
    n = topology.n
    out: list[str] = []
    lead = leader.leader_index
    if not 0 <= lead < n:
        return [f"leader index {lead} out of range for {n} agents"]
    for i in range(n):
        if w[i, i] != 0.0:
            out.append(f"self-edge: w[{i}][{i}] = {w[i, i]}")
    bad = np.argwhere(~np.isfinite(w) | (w < 0.0))
    for i, j in bad:
        out.append(f"invalid weight: w[{i}][{j}] = {w[i, j]}")
    if np.any(w[lead] > 0.0):
        cols = np.nonzero(w[lead] > 0.0)[0]
        out.append(f"leader row not zero: w[{lead}][{cols[0]}] = {w[lead, cols[0]]}")
    # breadth-first search along edge direction (j -> i when w[i][j] > 0)
    seen = {lead}
    queue = deque([lead])
    while queue:
        j = queue.popleft()
        for i in topology.out_neighbors(j):
            if i not in seen:
                seen.add(i)
                queue.append(i)
    for i in range(n):
        if i not in seen:
            out.append(f"agent {i} unreachable from leader {lead}")
    return out
