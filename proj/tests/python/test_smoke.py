"""Smoke tests for the _smcva extension module."""

import math

import numpy as np
import pytest

import _smcva as smc


@pytest.fixture(scope="module")
def spec():
    return smc.ModelSpec(dim=11, dt=0.025)


def test_fixed_point(spec):
    p = np.array([10.0])
    x = np.full(11, 10.0)
    assert np.all(smc.vector_field(spec, x, p) == 0.0)
    assert np.allclose(smc.discrete_map(spec, x, p), x, atol=1e-13)


def test_jacobian_matches_finite_difference(spec):
    rng = np.random.default_rng(3)
    x = rng.uniform(-8.0, 8.0, 11)
    p = np.array([10.0])
    jx, jp = smc.jacobians(spec, x, p)
    h = 1e-6
    for k in range(11):
        e = np.zeros(11)
        e[k] = h
        fd = (smc.vector_field(spec, x + e, p) -
              smc.vector_field(spec, x - e, p)) / (2 * h)
        assert np.allclose(jx[:, k], fd, atol=1e-6)
    assert np.allclose(jp[:, 0], 1.0)


def test_twin_data_and_action(spec):
    p = np.array([10.0])
    truth = smc.generate_truth(spec, p, 40, 10, seed=5)
    assert truth.shape == (51, 11)
    indices = smc.measured_indices(11, 4)
    assert indices == [0, 2, 5, 8]
    obs = smc.apply_noise(truth, indices, 40, smc.NoiseSpec(seed=5))
    assert obs.values.shape == (41, 4)
    assert obs.continuation.shape == (10, 4)

    path = smc.Path(states=truth[:41], params=p)
    value = smc.action(path, spec, r_m=6.5, r_f=1.0, obs=obs)
    assert value.model_term == pytest.approx(0.0, abs=1e-10)
    assert value.total > 0.0

    grad = smc.action_gradient(path, spec, 6.5, 1.0, obs)
    assert grad.shape == (41 * 11 + 1,)
    assert np.all(np.isfinite(grad))


def test_minimize_reduces_action(spec):
    p = np.array([10.0])
    truth = smc.generate_truth(spec, p, 30, 5, seed=9)
    obs = smc.apply_noise(truth, smc.measured_indices(11, 7), 30,
                          smc.NoiseSpec(seed=9))
    rng = np.random.default_rng(1)
    start = smc.Path(states=rng.uniform(-5, 5, (31, 11)),
                     params=np.array([8.0]))
    before = smc.action(start, spec, 6.5, 0.1, obs).total
    result = smc.minimize(start, spec, 6.5, 0.1, obs, max_iterations=300)
    assert result.action.total < before
    assert result.iterations > 0


def test_bias_density_normalization():
    center = smc.Path(states=np.zeros((1, 2)), params=np.array([0.0]))
    other = smc.Path(states=np.ones((1, 2)), params=np.array([1.0]))
    bias = smc.build_bias(center, other)
    assert np.all(bias.sigma_state == 4.0)
    lb = smc.log_bias(center, bias)
    expected = -3 * (0.5 * math.log(2 * math.pi) + math.log(4.0))
    assert lb == pytest.approx(expected)


def test_pipeline_stages(tmp_path):
    cfg = smc.RunConfig("desk")
    for key, value in [("model.d", "5"), ("measurement.l", "3"),
                       ("window.n_window", "20"), ("window.t_pred", "10"),
                       ("schedule.beta_max", "5"), ("schedule.alpha", "3.0"),
                       ("schedule.n_inits", "2"), ("sampler.walkers", "2"),
                       ("sampler.burn_in", "100"), ("sampler.steps", "1000"),
                       ("sampler.thin", "10")]:
        cfg.apply_key(key, value)
    cfg.seed = 4
    out = str(tmp_path)
    smc.run_generate(cfg, out)
    smc.run_anneal(cfg, out)
    smc.run_sample(cfg, out)
    smc.run_report(out)
    for name in ["truth.csv", "observations.csv", "manifest.json",
                 "action_levels.csv", "chain.csv", "report.json",
                 "fig_histogram.csv"]:
        assert (tmp_path / name).exists()
