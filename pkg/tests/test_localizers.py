"""Solver oracles: exact recovery, solver agreement, gradient correctness,
shrinkage algebra and weight normalization."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarmloc import (AdmmConfig, AnchorReport, GdConfig, ObservationSet,
                      RangingChannel, convert_error, error_weights,
                      localize_gd, localize_l1_admm, localize_ls,
                      soft_threshold)
from swarmloc.errors import ConfigError, SingularGeometryError


def _exact_obs(p_true, n=8, seed=0):
    rng = np.random.default_rng(seed)
    reports = []
    for i in range(n):
        pos = rng.uniform(-20.0, 20.0, 3)
        reports.append(AnchorReport(i, pos, 0.0, float(np.linalg.norm(p_true - pos))))
    return ObservationSet(target_id=-1, reports=reports)


def test_ls_exact_recovery():
    p_true = np.array([3.0, -7.0, 4.0])
    est = localize_ls(_exact_obs(p_true))
    assert np.linalg.norm(est - p_true) < 1e-6


def test_admm_matches_ls_noise_free():
    p_true = np.array([-2.0, 5.0, 1.0])
    obs = _exact_obs(p_true, seed=1)
    ls = localize_ls(obs)
    l1 = localize_l1_admm(obs, AdmmConfig(rho=0.1, k_admm=200))
    assert np.linalg.norm(l1 - ls) < 1e-3


def test_gd_exact_recovery_noise_free():
    p_true = np.array([1.0, 2.0, -3.0])
    obs = _exact_obs(p_true, seed=2)
    est = localize_gd(obs, GdConfig(alpha0=1.0, beta=0.5, k_gd=200),
                      start=np.mean(obs.positions(), axis=0))
    assert np.linalg.norm(est - p_true) < 1e-2


def test_gd_gradient_matches_finite_differences():
    from swarmloc.localizers import _gd_cost_grad
    rng = np.random.default_rng(3)
    positions = rng.uniform(-10.0, 10.0, (6, 3))
    distances = rng.uniform(1.0, 20.0, 6)
    p = rng.uniform(-5.0, 5.0, 3)
    _, grad = _gd_cost_grad(p, positions, distances)
    h = 1e-6
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = h
        cp, _ = _gd_cost_grad(p + e, positions, distances)
        cm, _ = _gd_cost_grad(p - e, positions, distances)
        assert grad[axis] == pytest.approx((cp - cm) / (2 * h), abs=1e-5)


def test_solvers_need_four_anchors():
    obs = _exact_obs(np.zeros(3), n=3)
    with pytest.raises(SingularGeometryError):
        localize_ls(obs)
    with pytest.raises(SingularGeometryError):
        localize_l1_admm(obs, AdmmConfig())


def test_ls_rejects_coplanar_anchors():
    reports = [AnchorReport(i, np.array([float(i), float(i * i), 0.0]), 0.0, 5.0)
               for i in range(6)]
    with pytest.raises(SingularGeometryError):
        localize_ls(ObservationSet(target_id=-1, reports=reports))


def test_duplicate_anchor_ids_rejected():
    reports = [AnchorReport(1, np.zeros(3), 0.0, 1.0),
               AnchorReport(1, np.ones(3), 0.0, 1.0)]
    with pytest.raises(ConfigError):
        ObservationSet(target_id=-1, reports=reports)


@given(st.lists(st.floats(min_value=-100, max_value=100), min_size=1, max_size=20),
       st.floats(min_value=1e-3, max_value=50.0))
def test_soft_threshold_shrinkage(xs, k):
    out = soft_threshold(np.array(xs), k)
    for x, y in zip(xs, np.atleast_1d(out)):
        assert abs(y) == pytest.approx(max(abs(x) - k, 0.0), abs=1e-12)
        assert y * x >= 0.0  # never flips sign


def test_soft_threshold_rejects_nonpositive_k():
    with pytest.raises(ValueError):
        soft_threshold(1.0, 0.0)


@given(st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=1, max_size=30))
def test_error_weight_reciprocals_sum_to_n(sigmas):
    w = error_weights(np.array(sigmas))
    assert float(np.sum(1.0 / w)) == pytest.approx(len(sigmas), rel=1e-9)
    assert np.all(w > 0)


def test_error_weights_order():
    # smaller sigma -> larger weight
    w = error_weights(np.array([0.5, 1.0, 2.0]))
    assert w[0] > w[1] > w[2]


def test_error_weights_reject_nonpositive():
    with pytest.raises(ValueError):
        error_weights(np.array([1.0, 0.0]))


def test_convert_error_deterministic_across_instances():
    c1 = convert_error(30.0, 1.5, RangingChannel())
    c2 = convert_error(30.0, 1.5, RangingChannel())
    assert c1 == c2


def test_convert_error_zero_sigma_p_reduces_to_ranging():
    ch = RangingChannel()
    conv = convert_error(30.0, 0.0, ch)
    assert conv.mu_cd == 0.0
    assert conv.sigma_cd == pytest.approx(float(ch.sigma_d(30.0)))


def test_convert_error_bias_positive_and_small():
    # position error inflates the expected distance slightly (norm convexity)
    conv = convert_error(30.0, 1.7, RangingChannel())
    assert 0.0 < conv.mu_cd < 0.2
    assert conv.sigma_cd > float(RangingChannel().sigma_d(30.0)) * 0.9


def test_convert_error_rejects_bad_inputs():
    ch = RangingChannel()
    with pytest.raises(ValueError):
        convert_error(0.0, 1.0, ch)
    with pytest.raises(ValueError):
        convert_error(10.0, -1.0, ch)
