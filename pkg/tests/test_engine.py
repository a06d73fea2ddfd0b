import dataclasses
import threading
import time

import numpy as np
import pytest

from swarmsim import SimulationHalt, SwarmCommand, build_context, run_scenario
from swarmsim.engine import Engine, step

from conftest import bundled_script, event_bytes, load_with, run_bundled


def test_empty_world_tick_increments():
    def empty(doc):
        doc["agents"] = {"count": 0, "v_max": 2.0}
        doc["stop"] = {"ticks": 3}
        doc["formations"] = []
        doc["initial_formation"] = None

    ctx, log = run_bundled("six_uav_t_to_diamond", mutate=empty)
    snaps = log.by_kind("snapshot")
    assert [e.tick for e in snaps] == [0, 1, 2, 3]
    assert all(e.payload["positions"] == [] for e in snaps)


def test_single_agent_zero_command_is_fixed_point():
    def single(doc):
        doc["agents"] = {"count": 1, "v_max": 2.0, "initial_positions": [[1.0, 2.0, 3.0]]}
        doc["topology"] = {"preset": "chain", "fan_in": 1}
        doc["formations"] = []
        doc["initial_formation"] = None
        doc["stop"] = {"ticks": 10}

    ctx, log = run_bundled("six_uav_t_to_diamond", mutate=single)
    for ev in log.by_kind("snapshot"):
        assert ev.payload["positions"] == [[1.0, 2.0, 3.0]]


def test_leader_velocity_moves_by_u_dt():
    # once the steering command is delivered, each tick advances x by exactly
    # u * dt = 0.02 (hand forward-Euler on the integrator model)
    def single(doc):
        doc["agents"] = {"count": 1, "v_max": 2.0, "initial_positions": [[0.0, 0.0, 0.0]]}
        doc["topology"] = {"preset": "chain", "fan_in": 1}
        doc["formations"] = []
        doc["initial_formation"] = None
        doc["stop"] = {"ticks": 10}

    script = {1: [SwarmCommand(kind="leader_velocity", velocity=(1.0, 0.0, 0.0))]}
    ctx, log = run_bundled("six_uav_t_to_diamond", script=script, mutate=single)
    snaps = {e.tick: e.payload["positions"][0] for e in log.by_kind("snapshot")}
    # command applied at tick 1, delivered at tick 2: motion starts there
    assert snaps[1] == [0.0, 0.0, 0.0]
    assert snaps[2] == [0.02, 0.0, 0.0]
    assert snaps[3] == [0.04, 0.0, 0.0]
    assert snaps[10][0] == pytest.approx(0.18)


def test_identical_runs_byte_identical():
    script = bundled_script("t_to_diamond")
    mutate = lambda d: d["stop"].update({"sim_time": 5})
    _, log_a = run_bundled("six_uav_t_to_diamond", script=script, mutate=mutate)
    _, log_b = run_bundled("six_uav_t_to_diamond", script=script, mutate=mutate)
    assert log_a.to_bytes() == log_b.to_bytes()


def test_seed_changes_trajectory():
    _, log_a = run_bundled("nine_uav_formation", mutate=lambda d: d["stop"].update({"sim_time": 1}))

    def reseed(doc):
        doc["seed"] = 1
        doc["stop"].update({"sim_time": 1})

    _, log_b = run_bundled("nine_uav_formation", mutate=reseed)
    assert log_a.to_bytes() != log_b.to_bytes()


def test_trajectories_invariant_under_speed_factor():
    streams = []
    for factor in (0.0, 20.0, 50.0):
        def mutate(doc, factor=factor):
            doc["speed_factor"] = factor
            doc["stop"] = {"ticks": 40}

        _, log = run_bundled("six_uav_t_to_diamond", mutate=mutate)
        streams.append(event_bytes(log))
    assert streams[0] == streams[1] == streams[2]


def test_wall_clock_tracks_speed_factor():
    timings = {}
    for factor in (1.0, 2.0):
        def mutate(doc, factor=factor):
            doc["speed_factor"] = factor
            doc["stop"] = {"ticks": 40}  # 0.8 s of sim time

        t0 = time.perf_counter()
        run_bundled("six_uav_t_to_diamond", mutate=mutate)
        timings[factor] = time.perf_counter() - t0
    assert timings[1.0] == pytest.approx(0.8, rel=0.2)
    assert timings[2.0] == pytest.approx(0.4, rel=0.2)


def test_free_run_does_not_sleep():
    t0 = time.perf_counter()
    run_bundled("six_uav_t_to_diamond", mutate=lambda d: d["stop"].update({"sim_time": 4}))
    assert time.perf_counter() - t0 < 2.0  # 4 s of sim in well under real time


def test_tick_limit_zero_only_initial_snapshot():
    ctx, log = run_bundled("six_uav_t_to_diamond", mutate=lambda d: d.update({"stop": {"ticks": 0}}))
    snaps = log.by_kind("snapshot")
    assert len(snaps) == 1 and snaps[0].tick == 0


def test_snapshot_decimation():
    def mutate(doc):
        doc["snapshot_every"] = 5
        doc["stop"] = {"ticks": 20}

    _, log = run_bundled("six_uav_t_to_diamond", mutate=mutate)
    assert [e.tick for e in log.by_kind("snapshot")] == [0, 5, 10, 15, 20]


def test_step_halts_on_nan_position():
    config = load_with("six_uav_t_to_diamond")
    ctx = build_context(config)
    engine = Engine(ctx)
    bad = np.array(engine.world.positions)
    bad[2, 1] = np.nan
    world = dataclasses.replace(engine.world, positions=bad)
    with pytest.raises(SimulationHalt) as err:
        step(world, ctx)
    assert err.value.agent == 2
    assert "CommandIntake" in str(err.value)


def test_step_pure_given_same_inputs():
    config = load_with("nine_uav_reconfig")
    ctx = build_context(config)
    engine = Engine(ctx)
    world = engine.world
    cmd = (SwarmCommand(kind="set_formation", name="pyramid"),)
    w1, ev1 = step(world, ctx, cmd)
    w2, ev2 = step(world, ctx, cmd)
    assert np.array_equal(w1.positions, w2.positions)
    assert np.array_equal(w1.velocities, w2.velocities)
    assert ev1 == ev2
    assert w1.rng_state == w2.rng_state


def test_unknown_formation_rejected_and_logged():
    script = {1: [SwarmCommand(kind="set_formation", name="starfish")]}
    _, log = run_bundled("six_uav_t_to_diamond", script=script,
                         mutate=lambda d: d["stop"].update({"sim_time": 1}))
    rejects = [e for e in log.events
               if e.kind == "violation" and e.payload.get("kind") == "command_rejected"]
    assert rejects and "starfish" in rejects[0].payload["detail"]
    assert not log.by_kind("assignment")


def test_scripted_commands_apply_at_exact_ticks():
    script = bundled_script("t_to_diamond")
    _, log = run_bundled("six_uav_t_to_diamond", script=script,
                         mutate=lambda d: d["stop"].update({"sim_time": 4}))
    (cmd_ev,) = log.by_kind("command")
    assert cmd_ev.tick == 100
    (assign_ev,) = log.by_kind("assignment")
    assert assign_ev.tick == 101  # formation command crosses the bus once


def test_formation_switch_updates_deltas_after_station_relay():
    script = bundled_script("t_to_diamond")
    ctx, log = run_bundled("six_uav_t_to_diamond", script=script,
                           mutate=lambda d: d["stop"].update({"sim_time": 4}))
    snaps = {e.tick: e.payload for e in log.by_kind("snapshot")}
    assert snaps[102]["formation"] == "T"  # assignment still in flight
    assert snaps[103]["formation"] == "diamond"  # station relay delivered


def test_pause_resume_from_thread():
    def mutate(doc):
        doc["speed_factor"] = 50.0
        doc["stop"] = {"ticks": 4000}

    config = load_with("six_uav_t_to_diamond", mutate)
    ctx = build_context(config)
    engine = Engine(ctx)
    runner = threading.Thread(target=engine.run, daemon=True)
    runner.start()
    time.sleep(0.15)
    engine.submit(SwarmCommand(kind="pause"))
    time.sleep(0.1)
    frozen = engine.world.tick
    time.sleep(0.15)
    assert engine.world.tick == frozen  # never advances while paused
    engine.submit(SwarmCommand(kind="resume"))
    time.sleep(0.15)
    assert engine.world.tick > frozen
    engine.submit(SwarmCommand(kind="stop"))
    runner.join(timeout=5)
    assert not runner.is_alive()


def test_set_speed_factor_validation():
    config = load_with("six_uav_t_to_diamond")
    engine = Engine(build_context(config))
    assert engine.set_speed_factor(2.0) is True
    with pytest.raises(ValueError):
        engine.set_speed_factor(-1.0)
    with pytest.raises(ValueError):
        engine.set_speed_factor(float("nan"))


def test_sim_clock_derives_time_from_tick():
    from swarmsim.engine import SimClock

    clock = SimClock(tick=300, dt=0.02, speed_factor=1.0)
    assert clock.sim_time == 300 * 0.02
    with pytest.raises(ValueError):
        SimClock(tick=-1, dt=0.02, speed_factor=1.0)
    with pytest.raises(ValueError):
        SimClock(tick=0, dt=0.0, speed_factor=1.0)


def test_engine_clock_tracks_world():
    config = load_with("six_uav_t_to_diamond")
    engine = Engine(build_context(config))
    assert engine.clock.tick == 0
    engine.step_once()
    engine.step_once()
    assert engine.clock.tick == 2
    assert engine.clock.sim_time == pytest.approx(0.04)


def test_phase_order_constant():
    from swarmsim.engine import PHASES

    assert PHASES == ("CommandIntake", "BusDelivery", "Coordination",
                      "HighLevelControl", "LowLevelControl", "Integrate", "Telemetry")


def test_displacement_bounded_in_logged_run():
    ctx, log = run_bundled("nine_uav_formation",
                           mutate=lambda d: d["stop"].update({"sim_time": 5}))
    snaps = [np.array(e.payload["positions"]) for e in log.by_kind("snapshot")]
    v_max, dt = ctx.v_max, ctx.dt
    for a, b in zip(snaps, snaps[1:]):
        steps = np.linalg.norm(b - a, axis=1)
        assert np.all(steps <= v_max * dt + 1e-9)


def test_mission_complete_stop():
    ctx, log = run_bundled("search_six_uav")
    detections = log.by_kind("detection")
    assert len(detections) == 1
    last_snap = log.by_kind("snapshot")[-1]
    assert last_snap.tick == detections[0].tick
