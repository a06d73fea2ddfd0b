"""Event records written to the telemetry log."""

from __future__ import annotations

from dataclasses import dataclass

# Rank mirrors the phase order inside a tick; (tick, rank, seq) is the
# total order of the log.
KIND_RANK = {
    "command": 0,
    "delivery": 1,
    "assignment": 2,
    "detection": 3,
    "violation": 4,
    "snapshot": 5,
}


@dataclass(frozen=True)
class SimEvent:
    tick: int
    kind: str
    payload: dict
    seq: int = -1  # assigned by the log on record

    def __post_init__(self):
        if self.kind not in KIND_RANK:
            raise ValueError(f"unknown event kind {self.kind!r}")

    @property
    def rank(self) -> int:
        return KIND_RANK[self.kind]

    def sort_key(self) -> tuple[int, int, int]:
        return (self.tick, self.rank, self.seq)
