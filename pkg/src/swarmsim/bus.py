"""Simulated communication layer.

Topic-based publish/subscribe with one-tick delivery latency; deliveries
between agents are admitted only where the topology has an edge.  The
ground station ("gcs") is exempt from the gate in both directions, as is
the ground-truth relative-position service.  Topic names follow the
documented convention with 1-based agent ids:

    /uav<k>/state      per-agent state report
    /uav<k>/cmd_vel    station steering command for agent k
    /leader/formation_cmd   station -> leader formation switch
    /leader/assignment      leader -> station -> all: slot mapping
    /mission/detection      detecting agent -> station
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import SwarmSimError
from .topology import TopologyMatrix

GCS = "gcs"
FORMATION_CMD_TOPIC = "/leader/formation_cmd"
ASSIGNMENT_TOPIC = "/leader/assignment"
DETECTION_TOPIC = "/mission/detection"

_STATE_RE = re.compile(r"^/uav(\d+)/state$")
_CMD_VEL_RE = re.compile(r"^/uav(\d+)/cmd_vel$")


def state_topic(agent: int) -> str:
    return f"/uav{agent + 1}/state"


def cmd_vel_topic(agent: int) -> str:
    return f"/uav{agent + 1}/cmd_vel"


@dataclass(frozen=True)
class TopicMessage:
    topic: str
    sender: int | str  # agent index or "gcs"
    tick_sent: int
    seq: int
    payload: dict


@dataclass(frozen=True)
class RelativePositionReport:
    observer: int
    neighbor: int
    r: np.ndarray  # points from observer toward neighbor, meters


def well_formed_topic(topic: str) -> bool:
    return bool(
        topic in (FORMATION_CMD_TOPIC, ASSIGNMENT_TOPIC, DETECTION_TOPIC)
        or _STATE_RE.match(topic)
        or _CMD_VEL_RE.match(topic)
    )


def publish(pending: list[TopicMessage], msg: TopicMessage, n: int) -> TopicMessage:
    """Enqueue a message for delivery at the next tick's BusDelivery phase.

    Rejects unknown senders and malformed topics; returns the queued
    message as the acknowledgement.
    """
    if msg.sender != GCS and not (isinstance(msg.sender, int) and 0 <= msg.sender < n):
        raise SwarmSimError(f"publish rejected: unknown sender {msg.sender!r}")
    if not well_formed_topic(msg.topic):
        raise SwarmSimError(f"publish rejected: malformed topic {msg.topic!r}")
    pending.append(msg)
    return msg


def gate(sender: int, receiver: int, topology: TopologyMatrix) -> bool:
    """True iff agent ``receiver`` may hear agent ``sender`` (w[r][s] > 0).

    Applies to inter-agent traffic only; station and relative-position
    service deliveries bypass it.
    """
    if sender == receiver:
        return False
    return bool(topology.w[receiver, sender] > 0.0)


def route(
    messages: tuple[TopicMessage, ...] | list[TopicMessage],
    topology: TopologyMatrix,
    leader_index: int,
) -> list[tuple[TopicMessage, int | str]]:
    """Expand queued messages into (message, receiver) deliveries.

    Order is deterministic: messages sorted by (topic, sender, seq), and
    fan-out receivers ascending.  State reports fan out to the sender's
    out-neighbors, which is exactly the set the gate admits.
    """
    n = topology.n
    deliveries: list[tuple[TopicMessage, int | str]] = []
    for msg in sorted(messages, key=lambda m: (m.topic, str(m.sender), m.seq)):
        m = _STATE_RE.match(msg.topic)
        if m:
            sender = int(m.group(1)) - 1
            for i in topology.out_neighbors(sender):
                deliveries.append((msg, i))
            continue
        m = _CMD_VEL_RE.match(msg.topic)
        if m:
            deliveries.append((msg, int(m.group(1)) - 1))
            continue
        if msg.topic == FORMATION_CMD_TOPIC:
            deliveries.append((msg, leader_index))
        elif msg.topic == ASSIGNMENT_TOPIC:
            if msg.sender == GCS:
                for i in range(n):
                    deliveries.append((msg, i))
            else:
                deliveries.append((msg, GCS))  # station relays next tick
        elif msg.topic == DETECTION_TOPIC:
            deliveries.append((msg, GCS))
    return deliveries


def relative_positions(
    positions: np.ndarray,
    observer: int,
    range_limit: float | None = None,
) -> list[RelativePositionReport]:
    """Ground-truth separation vectors from ``observer`` to every other
    agent within ``range_limit`` (None = unlimited)."""
    out: list[RelativePositionReport] = []
    for j in range(positions.shape[0]):
        if j == observer:
            continue
        r = positions[j] - positions[observer]
        if range_limit is not None and float(np.linalg.norm(r)) > range_limit:
            continue
        out.append(RelativePositionReport(observer=observer, neighbor=j, r=r))
    return out


def audit(log, topology: TopologyMatrix) -> list[str]:
    """Check every recorded inter-agent delivery against the gate.

    Station traffic (either direction) and the relative-position service
    are exempt.  Returns one violation string per offending delivery.
    """
    out: list[str] = []
    for ev in log.events:
        if ev.kind != "delivery":
            continue
        sender = ev.payload["sender"]
        receiver = ev.payload["receiver"]
        if sender == GCS or receiver == GCS:
            continue
        if not isinstance(sender, int) or not isinstance(receiver, int):
            continue
        if not gate(sender, receiver, topology):
            out.append(
                f"tick {ev.tick}: delivery on {ev.payload['topic']} from agent {sender} "
                f"to agent {receiver} violates topology (w[{receiver}][{sender}] = 0)"
            )
        if ev.payload["tick_sent"] + 1 != ev.tick:
            out.append(
                f"tick {ev.tick}: delivery on {ev.payload['topic']} seq {ev.payload['seq']} "
                f"sent at tick {ev.payload['tick_sent']} breaks one-tick latency"
            )
    return out
