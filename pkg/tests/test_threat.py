"""Attack modes and scheduling: tamper algebra, window placement, budget
parity between random and coordinated strategies."""

import numpy as np
import pytest

from swarmloc import (AnchorReport, AttackMode, AttackStrategy, attack_active,
                      stalk_waypoint, tamper_report)
from swarmloc.errors import ConfigError


def _honest():
    return AnchorReport(7, np.array([10.0, 20.0, 5.0]), 1.2, 25.0)


def test_bias_adds_exact_offset():
    mode = AttackMode(kind="bias", bias=(200.0, 200.0, 5.0))
    rng = np.random.default_rng(0)
    out = tamper_report(mode, _honest(), rng)
    assert np.array_equal(out.reported_pos, np.array([210.0, 220.0, 10.0]))
    assert out.measured_distance == 25.0
    assert out.reported_sigma_p == 1.2


def test_jamming_degrades_everything():
    mode = AttackMode(kind="jamming", jamming_index=5.0)
    rng = np.random.default_rng(1)
    outs = [tamper_report(mode, _honest(), rng) for _ in range(500)]
    assert all(o.measured_distance >= 0.0 for o in outs)
    assert all(o.reported_sigma_p > 1.2 for o in outs)
    # distance tamper is a non-negative uniform addition
    assert all(o.measured_distance >= 25.0 for o in outs)
    assert max(o.measured_distance for o in outs) <= 30.0


def test_manipulation_understates_sigma():
    mode = AttackMode(kind="manipulation", manipulation_index=200.0)
    rng = np.random.default_rng(2)
    out = tamper_report(mode, _honest(), rng)
    assert out.reported_sigma_p == pytest.approx(200.0 ** -0.5)
    assert out.measured_distance == 25.0
    assert not np.array_equal(out.reported_pos, _honest().reported_pos)


def test_mode_validation():
    with pytest.raises(ConfigError):
        AttackMode(kind="nuke")
    with pytest.raises(ConfigError):
        AttackMode(kind="jamming", jamming_index=0.0)


def test_strategy_validation():
    with pytest.raises(ConfigError):
        AttackStrategy(kind="sneaky")
    with pytest.raises(ConfigError):
        AttackStrategy(kind="random", rate=1.5)
    with pytest.raises(ConfigError):
        AttackStrategy(kind="coordinated", window=0)


def test_coordinated_window_centered():
    strat = AttackStrategy(kind="coordinated", window=50)
    rng = np.random.default_rng(3)
    active = [attack_active(strat, 0, 1, t, rng, total_steps=100)
              for t in range(1, 101)]
    assert sum(active) == 50
    # centered: inactive before tick 26 and after tick 75
    assert active[24] is False and active[25] is True
    assert active[74] is True and active[75] is False


def test_coordinated_window_explicit_start():
    strat = AttackStrategy(kind="coordinated", window=10, t_start=5)
    rng = np.random.default_rng(4)
    active = [t for t in range(1, 101)
              if attack_active(strat, 0, 1, t, rng, total_steps=100)]
    assert active == list(range(5, 15))


def test_budget_parity_random_vs_coordinated():
    # Expected tampered steps over T=100: rate-0.5 random = 50 = one 50-tick
    # coordinated window, so the strategies compare at equal attack budget.
    coord = AttackStrategy(kind="coordinated", window=50)
    rand = AttackStrategy(kind="random", rate=0.5)
    rng = np.random.default_rng(5)
    coord_steps = sum(attack_active(coord, 0, 1, t, rng, 100)
                      for t in range(1, 101))
    rand_counts = [sum(attack_active(rand, 0, 1, t, rng, 100)
                       for t in range(1, 101)) for _ in range(300)]
    assert coord_steps == 50
    assert np.mean(rand_counts) == pytest.approx(50.0, abs=1.0)


def test_stalking_always_active():
    strat = AttackStrategy(kind="stalking", victim_id=101)
    rng = np.random.default_rng(6)
    assert all(attack_active(strat, 0, tid, t, rng, 100)
               for tid in (101, 102) for t in (1, 50, 100))


def test_stalk_waypoint_is_victim_position_copy():
    pos = np.array([1.0, 2.0, 3.0])
    wp = stalk_waypoint(pos)
    assert np.array_equal(wp, pos)
    wp[0] = 99.0
    assert pos[0] == 1.0
