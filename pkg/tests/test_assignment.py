import itertools
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmsim import (
    AgentState,
    CostMatrix,
    LeaderDesignation,
    build_cost_matrix,
    builtin_formations,
    reconfigure,
    solve,
    solve_max,
)


def brute_force_min(c: np.ndarray) -> float:
    n = c.shape[0]
    return min(sum(c[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def states_from(positions):
    return [AgentState(i, np.array(p, dtype=float), np.zeros(3)) for i, p in enumerate(positions)]


def test_identity_favoring_matrix():
    sol = solve(CostMatrix(np.array([[0.0, 5.0], [5.0, 0.0]])))
    assert sol.permutation == (0, 1)
    assert sol.total_cost == 0.0


def test_swap_favoring_matrix():
    c = np.array([[math.sqrt(2), 0.0], [0.0, math.sqrt(2)]])
    sol = solve(CostMatrix(c))
    # brute force over both permutations: identity costs 2*sqrt(2), swap costs 0
    assert brute_force_min(c) == 0.0
    assert sol.permutation == (1, 0)
    assert sol.total_cost == 0.0


def test_solver_matches_exhaustive_minimum():
    rng = np.random.default_rng(42)
    for _ in range(40):
        c = rng.random((5, 5)) * 10
        sol = solve(CostMatrix(c))
        assert sol.total_cost == pytest.approx(brute_force_min(c), abs=1e-9)


def test_permutation_is_bijection():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(1, 9))
        sol = solve(CostMatrix(rng.random((n, n))))
        assert sorted(sol.permutation) == list(range(n))


def test_row_constant_shift_keeps_optimum():
    rng = np.random.default_rng(11)
    for _ in range(20):
        c = rng.random((6, 6)) * 4
        shifted = c.copy()
        shifted[2] += 3.7
        sol = solve(CostMatrix(shifted))
        assert sol.total_cost == pytest.approx(brute_force_min(shifted), abs=1e-9)


def test_deterministic_on_ties():
    c = np.zeros((4, 4))
    first = solve(CostMatrix(c))
    second = solve(CostMatrix(c))
    assert first == second
    assert first.permutation == (0, 1, 2, 3)  # lowest index wins ties


def test_max_weight_equals_min_cost_on_negation():
    rng = np.random.default_rng(3)
    for _ in range(30):
        c = rng.random((6, 6)) * 9
        assert solve_max(-c).permutation == solve(CostMatrix(c)).permutation


def test_hundred_by_hundred_under_a_second():
    rng = np.random.default_rng(0)
    c = rng.random((100, 100)) * 100
    t0 = time.perf_counter()
    sol = solve(CostMatrix(c))
    elapsed = time.perf_counter() - t0
    assert sorted(sol.permutation) == list(range(100))
    assert elapsed < 1.0


def test_cost_matrix_validation():
    with pytest.raises(ValueError):
        CostMatrix(np.array([[1.0, 2.0]]))
    with pytest.raises(ValueError):
        CostMatrix(np.array([[1.0, -2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        CostMatrix(np.array([[np.inf, 2.0], [0.0, 1.0]]))


def test_build_cost_matrix_hand_case():
    # followers at leader-frame (1,0,0) and (0,1,0); slots (0,1,0) and (1,0,0)
    states = states_from([(5.0, 5.0, 5.0), (6.0, 5.0, 5.0), (5.0, 6.0, 5.0)])
    target = np.array([[0, 0, 0], [0, 1, 0], [1, 0, 0]], dtype=float)
    from swarmsim import FormationSpec

    cost = build_cost_matrix(states, LeaderDesignation(0), FormationSpec("x", target))
    root2 = math.sqrt(2.0)
    assert np.allclose(cost.c, [[root2, 0.0], [0.0, root2]])


def test_build_cost_matrix_translation_invariant():
    rng = np.random.default_rng(5)
    pos = rng.random((4, 3)) * 10
    from swarmsim import FormationSpec

    spec = FormationSpec("s", np.array([[0, 0, 0], [2, 0, 0], [0, 2, 0], [0, 0, 2]], dtype=float))
    a = build_cost_matrix(states_from(pos), LeaderDesignation(0), spec)
    b = build_cost_matrix(states_from(pos + 100.0), LeaderDesignation(0), spec)
    assert np.allclose(a.c, b.c, atol=1e-9)


def test_zero_diagonal_when_already_on_slots():
    spec = [f for f in builtin_formations(9) if f.name == "cube"][0]
    base = np.array([3.0, 4.0, 5.0])
    states = states_from(base + spec.offsets)
    cost = build_cost_matrix(states, LeaderDesignation(0), spec)
    assert np.allclose(np.diag(cost.c), 0.0, atol=1e-12)
    mapping = reconfigure(None, spec, states)
    assert [e[0] for e in mapping.entries] == list(range(1, 9))
    assert [e[1] for e in mapping.entries] == list(range(1, 9))
    assert mapping.total_cost == pytest.approx(0.0, abs=1e-12)


def test_reconfigure_rejects_count_mismatch():
    spec = [f for f in builtin_formations(6) if f.name == "diamond"][0]
    states = states_from(np.zeros((9, 3)) + np.arange(9)[:, None])
    with pytest.raises(ValueError):
        reconfigure(None, spec, states)


def test_nine_uav_cube_assignment_vs_exhaustive():
    # 8 follower slots: brute force over 8! permutations, feasible once here
    spec = [f for f in builtin_formations(9) if f.name == "cube"][0]
    rng = np.random.default_rng(19)
    states = states_from(rng.random((9, 3)) * 6)
    cost = build_cost_matrix(states, LeaderDesignation(0), spec)
    sol = solve(cost)
    assert sol.total_cost == pytest.approx(brute_force_min(cost.c), abs=1e-9)


def test_t_to_diamond_not_worse_than_identity():
    six = {f.name: f for f in builtin_formations(6)}
    base = np.array([0.0, 0.0, 10.0])
    states = states_from(base + six["T"].offsets)
    mapping = reconfigure(six["T"], six["diamond"], states)
    identity_cost = float(
        sum(np.linalg.norm((states[i].position - base) - six["diamond"].offsets[i])
            for i in range(1, 6))
    )
    assert mapping.total_cost <= identity_cost + 1e-12
