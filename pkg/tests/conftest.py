import copy
import json
from importlib import resources

import numpy as np
import pytest

from swarmsim import SwarmCommand, build_context, load_scenario, run_scenario
from swarmsim.scenario import ScenarioConfig

BUNDLED_SCENARIOS = [
    "nine_uav_formation",
    "nine_uav_overshoot",
    "nine_uav_reconfig",
    "nine_uav_console",
    "six_uav_t_to_diamond",
    "search_six_uav",
    "collision_demo",
]


def load_with(name, mutate=None) -> ScenarioConfig:
    """Load a bundled scenario; ``mutate(doc)`` edits the resolved doc."""
    config = load_scenario(name)
    if mutate is not None:
        doc = copy.deepcopy(config.doc)
        mutate(doc)
        config = ScenarioConfig(doc=doc, path=config.path, warnings=config.warnings)
    return config


def bundled_script(name) -> dict[int, list[SwarmCommand]]:
    text = resources.files("swarmsim").joinpath(f"data/scripts/{name}.json").read_text()
    script: dict[int, list[SwarmCommand]] = {}
    for entry in json.loads(text):
        script.setdefault(int(entry["tick"]), []).append(
            SwarmCommand.from_payload(entry["command"])
        )
    return script


def run_bundled(name, script=None, mutate=None):
    config = load_with(name, mutate)
    ctx = build_context(config)
    return ctx, run_scenario(ctx, script=script)


def min_pairwise_distance(log) -> float:
    best = float("inf")
    for ev in log.by_kind("snapshot"):
        p = np.array(ev.payload["positions"])
        if p.shape[0] < 2:
            continue
        d = np.linalg.norm(p[None, :, :] - p[:, None, :], axis=2)
        np.fill_diagonal(d, np.inf)
        best = min(best, float(d.min()))
    return best


def event_bytes(log) -> bytes:
    """Serialized event stream without the header (pacing-independent part)."""
    full = log.to_bytes()
    from swarmsim.telemetry import MAGIC, canonical_json
    import struct

    head_len = struct.unpack_from(">I", full, len(MAGIC))[0]
    return full[len(MAGIC) + 4 + head_len:]


@pytest.fixture
def six_topology():
    from swarmsim import six_uav_example

    return six_uav_example()
