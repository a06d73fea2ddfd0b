"""Two followers swap sides through a head-on pass while the leader
hovers between them. With the avoidance rule off they fly straight
through each other (proximity violations); with it on, the deflection
vectors are equal and opposite, so one dips and the other climbs."""

import copy

import numpy as np

from swarmsim import build_context, load_scenario, run_scenario
from swarmsim.scenario import ScenarioConfig


def closest_pass(enabled: bool):
    config = load_scenario("collision_demo")
    doc = copy.deepcopy(config.doc)
    doc["avoidance"]["enabled"] = enabled
    ctx = build_context(ScenarioConfig(doc=doc, path=config.path, warnings=[]))
    log = run_scenario(ctx)
    best = float("inf")
    split = 0.0
    for ev in log.by_kind("snapshot"):
        p = np.array(ev.payload["positions"])
        d = float(np.linalg.norm(p[1] - p[2]))
        if d < best:
            best = d
            split = p[1][2] - p[2][2]
    violations = [e for e in log.events
                  if e.kind == "violation" and e.payload.get("kind") == "proximity"]
    return best, split, len(violations)


off = closest_pass(False)
on = closest_pass(True)
print("avoidance OFF: closest pass %.2f m, %d proximity violations" % (off[0], off[2]))
print("avoidance ON:  closest pass %.2f m, vertical split %.2f m" % (on[0], on[1]))
print()
print("the deflections are antisymmetric: the +x agent dives, the -x agent")
print("climbs. A perfectly symmetric max-speed head-on still passes close;")
print("the rule guarantees mitigation, not a minimum separation, which is")
print("why the demo ships with avoidance disabled to showcase the violation")
print("events and the reconfiguration scenarios rely on wider formations.")
