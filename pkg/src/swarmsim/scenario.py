"""Scenario files: parsing, schema validation and run-context assembly.

Scenarios are JSON documents validated against the published schema
(``swarmsim/data/scenario.schema.json``).  Keys starting with ``_`` are
comments and stripped before validation.  Defaults are filled in, so the
resolved document embedded in log headers is complete and hashable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .avoidance import AvoidanceConfig
from .engine import MissionContext, RunContext
from .errors import ScenarioError
from .formation import FormationSpec, builtin_formations, load_formation_file
from .search import SearchRegion, build_search_plan
from .topology import LeaderDesignation, TopologyMatrix, chain_topology, validate

_DEFAULTS = {
    "dt": 0.02,
    "seed": 0,
    "speed_factor": 0.0,
    "snapshot_every": 1,
    "d_min": 1.0,
    "leader": 0,
    "formations": "builtin",
    "initial_formation": None,
}


@dataclass
class ScenarioConfig:
    doc: dict  # resolved (defaults applied, comments stripped)
    path: Path | None
    warnings: list[str] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.doc["name"]


def _strip_comments(obj):
    if isinstance(obj, dict):
        return {k: _strip_comments(v) for k, v in obj.items() if not k.startswith("_")}
    if isinstance(obj, list):
        return [_strip_comments(v) for v in obj]
    return obj


def _schema() -> dict:
    text = resources.files("swarmsim").joinpath("data/scenario.schema.json").read_text()
    return json.loads(text)


def _apply_defaults(doc: dict) -> dict:
    out = dict(doc)
    for key, val in _DEFAULTS.items():
        out.setdefault(key, val)
    agents = dict(out["agents"])
    agents.setdefault("v_max", 2.0)
    out["agents"] = agents
    out["control"] = {"gain": out.get("control", {}).get("gain", 1.0)}
    if "avoidance" in out:
        av = dict(out["avoidance"])
        av.setdefault("enabled", True)
        av.setdefault("b", 3.0)
        av.setdefault("kp", 1.0)
        av.setdefault("literal_branch", False)
        out["avoidance"] = av
    if "mission" in out:
        m = dict(out["mission"])
        m.setdefault("altitude", 5.0)
        m.setdefault("p_detect", 0.9)
        m.setdefault("footprint_radius", 5.0)
        m.setdefault("accept_radius", 0.5)
        out["mission"] = m
    return out


def bundled_scenario_path(name: str) -> Path | None:
    """Resolve a shipped scenario by bare name (no extension)."""
    candidate = resources.files("swarmsim").joinpath(f"data/scenarios/{name}.json")
    try:
        with resources.as_file(candidate) as p:
            return Path(p) if p.exists() else None
    except FileNotFoundError:
        return None


def load_scenario(path_or_name: str | Path) -> ScenarioConfig:
    """Load, validate and resolve a scenario file.

    Raises :class:`ScenarioError` carrying every violation found (schema
    errors use JSON-pointer paths).  Non-fatal findings (spawn positions
    closer than d_min, a discrete-gain guard breach) land in ``warnings``.
    """
    path = Path(path_or_name)
    if not path.exists():
        bundled = bundled_scenario_path(str(path_or_name))
        if bundled is None:
            raise ScenarioError([f"no such scenario file or bundled scenario: {path_or_name}"])
        path = bundled
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError([f"{path}: not valid JSON: {e}"]) from e

    doc = _strip_comments(raw)
    validator = jsonschema.Draft202012Validator(_schema())
    schema_errors = [
        f"{'/'.join(str(p) for p in err.absolute_path) or '<root>'}: {err.message}"
        for err in sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    ]
    if schema_errors:
        raise ScenarioError(schema_errors)

    doc = _apply_defaults(doc)
    errors: list[str] = []
    warnings: list[str] = []
    n = doc["agents"]["count"]

    topo_block = doc["topology"]
    if "matrix" in topo_block:
        m = topo_block["matrix"]
        if len(m) != n or any(len(row) != n for row in m):
            errors.append(f"topology/matrix: must be {n}x{n} to match agents/count")
    elif topo_block.get("preset") == "chain":
        if "fan_in" not in topo_block:
            errors.append("topology/fan_in: required for the chain preset")
    else:
        errors.append("topology: need either a chain preset or an explicit matrix")

    positions = doc["agents"].get("initial_positions")
    spawn = doc["agents"].get("spawn")
    if positions is not None and spawn is not None:
        errors.append("agents: initial_positions and spawn are mutually exclusive")
    if positions is None and spawn is None and n > 0:
        errors.append("agents: one of initial_positions or spawn is required")
    if positions is not None and len(positions) != n:
        errors.append(f"agents/initial_positions: {len(positions)} entries for {n} agents")
    if spawn is not None:
        if spawn["kind"] == "random_cube" and "span" not in spawn:
            errors.append("agents/spawn: random_cube requires span")
        if spawn["kind"] == "grid" and "spacing" not in spawn:
            errors.append("agents/spawn: grid requires spacing")

    if not errors:
        try:
            formations = _build_formations(doc, path.parent)
        except (OSError, KeyError, ValueError) as e:
            errors.append(f"formations: {e}")
            formations = {}
        for spec in formations.values():
            if spec.n != n:
                errors.append(
                    f"formations/{spec.name}: {spec.n} offsets for {n} agents"
                )
            else:
                errors.extend(f"formations/{spec.name}: {v}" for v in spec.violations(doc["d_min"]))
        initial = doc["initial_formation"]
        if initial is not None and initial not in formations:
            hint = ", ".join(sorted(formations)) or "none for this agent count; supply offsets in the scenario file"
            errors.append(f"initial_formation: {initial!r} not in library (available: {hint})")

        topology = _build_topology(doc)
        if n > 0:
            errors.extend(f"topology: {v}" for v in validate(topology, LeaderDesignation(doc["leader"])))

        if positions is not None:
            pos = np.array(positions, dtype=float)
            for i in range(n):
                for j in range(i + 1, n):
                    d = float(np.linalg.norm(pos[i] - pos[j]))
                    if d < doc["d_min"]:
                        warnings.append(
                            f"agents {i} and {j} spawn {d:.3f} m apart (< d_min {doc['d_min']})"
                        )

        # discrete consensus stability guard: per-tick gain must stay < 1
        if n > 0:
            indeg = float(np.max(np.sum(topology.w > 0, axis=1)))
            max_w = float(np.max(topology.w)) if topology.w.size else 0.0
            guard = doc["control"]["gain"] * max_w * doc["dt"] * indeg
            if guard >= 1.0:
                warnings.append(
                    f"discrete gain guard: gain*w*dt*max_in_degree = {guard:.3f} >= 1 "
                    "(forward-Euler consensus may ring or diverge)"
                )

    if "mission" in doc and n >= 1:
        m = doc["mission"]
        strip_width = m["region"]["width"] / n
        short_side = min(strip_width, m["region"]["height"])
        if m["swath"] > short_side:
            warnings.append(
                f"mission/swath {m['swath']} exceeds cell short side {short_side:.3f}; "
                "boundary tracks will still cover the cell"
            )

    if errors:
        raise ScenarioError(errors)
    return ScenarioConfig(doc=doc, path=path, warnings=warnings)


def _build_topology(doc: dict) -> TopologyMatrix:
    n = doc["agents"]["count"]
    if n == 0:
        return TopologyMatrix(np.zeros((0, 0)))
    block = doc["topology"]
    if "matrix" in block:
        return TopologyMatrix(np.array(block["matrix"], dtype=float))
    return chain_topology(n, block["fan_in"])


def _build_formations(doc: dict, base_dir: Path) -> dict[str, FormationSpec]:
    block = doc["formations"]
    if block == "builtin":
        specs = builtin_formations(doc["agents"]["count"])
    elif isinstance(block, dict):
        specs = [load_formation_file(base_dir / f) for f in block["files"]]
    else:
        specs = [FormationSpec(f["name"], np.array(f["offsets"], dtype=float)) for f in block]
    return {s.name: s for s in specs}


def build_context(config: ScenarioConfig) -> RunContext:
    """Assemble the immutable RunContext the engine consumes."""
    doc = config.doc
    n = doc["agents"]["count"]
    topology = _build_topology(doc)
    base = config.path.parent if config.path else Path.cwd()
    formations = _build_formations(doc, base)

    avoidance = None
    if "avoidance" in doc:
        av = doc["avoidance"]
        avoidance = AvoidanceConfig(b=av["b"], kp=av["kp"], enabled=av["enabled"],
                                    literal_branch=av["literal_branch"])

    mission = None
    if "mission" in doc:
        m = doc["mission"]
        region = SearchRegion(origin=tuple(m["region"]["origin"]),
                              width=m["region"]["width"], height=m["region"]["height"],
                              altitude=m["altitude"])
        plan = build_search_plan(region, n, m["swath"])
        if m["target"] == "random":
            # drawn from a dedicated stream so the in-run stream is untouched
            rng = np.random.default_rng(doc["seed"] + 1)
            tx = region.origin[0] + rng.random() * region.width
            ty = region.origin[1] + rng.random() * region.height
        else:
            tx, ty = m["target"]
        mission = MissionContext(region=region, plan=plan,
                                 target=np.array([tx, ty, 0.0]),
                                 p_detect=m["p_detect"],
                                 footprint_radius=m["footprint_radius"],
                                 accept_radius=m["accept_radius"])

    positions = doc["agents"].get("initial_positions")
    return RunContext(
        n=n,
        dt=doc["dt"],
        seed=doc["seed"],
        topology=topology,
        leader=LeaderDesignation(doc["leader"]),
        v_max=doc["agents"]["v_max"],
        gain=doc["control"]["gain"],
        formations=formations,
        avoidance=avoidance,
        mission=mission,
        d_min=doc["d_min"],
        snapshot_every=doc["snapshot_every"],
        scenario=doc,
        initial_positions=np.array(positions, dtype=float) if positions is not None else None,
        spawn=doc["agents"].get("spawn"),
        initial_formation=doc["initial_formation"],
        stop=doc["stop"],
        speed_factor=doc["speed_factor"],
    )


def load_command_script(path: str | Path) -> dict[int, list[dict]]:
    """Command script file: ``[{"tick": N, "command": {...}}, ...]``."""
    entries = json.loads(Path(path).read_text())
    script: dict[int, list[dict]] = {}
    for entry in entries:
        tick = int(entry["tick"])
        if tick < 1:
            raise ScenarioError([f"command script: tick must be >= 1, got {tick}"])
        script.setdefault(tick, []).append(entry["command"])
    return script
