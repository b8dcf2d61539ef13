import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from vortexlab import geometry as G
from vortexlab import representations as R
from vortexlab.errors import ConfigurationError, DomainError


def test_sphere_area_values():
    assert_allclose(G.sphere_area(2), 2 * math.pi)
    assert_allclose(G.sphere_area(3), 4 * math.pi)
    assert_allclose(G.sphere_area(4), 2 * math.pi ** 2)


def test_area_density_examples():
    assert_allclose(G.area_density(G.euclidean(2), 2.0), 4 * math.pi, rtol=1e-15)
    assert_allclose(G.area_density(G.hyperbolic(2), 1.0), 2 * math.pi * math.sinh(1.0), rtol=1e-15)
    for n in range(2, 7):
        assert G.area_density(G.euclidean(n), 1e-12) < 1e-11


def test_area_density_domain_errors():
    with pytest.raises(DomainError):
        G.area_density(G.euclidean(2), -1.0)
    with pytest.raises(DomainError):
        G.area_density(G.exterior_ball(2), 0.5)


def test_log_area_derivative_examples():
    assert_allclose(G.log_area_derivative(G.euclidean(3), 2.0), 1.0)
    assert abs(G.log_area_derivative(G.hyperbolic(2), 20.0) - 1.0) < 1e-6


def test_custom_table_matches_euclidean():
    r = np.linspace(0.05, 30, 600)
    tab = G.RadialTable.sample(lambda x: 2 * math.pi * x, r)
    m = G.ManifoldSpec("full", 2, "custom", table=tab)
    probe = np.linspace(0.1, 25, 50)
    assert_allclose(G.log_area_derivative(m, probe), 1.0 / probe, rtol=1e-6)
    assert_allclose(G.area_density(m, probe), 2 * math.pi * probe, rtol=1e-10)


@pytest.mark.parametrize("m", [G.euclidean(2), G.euclidean(5), G.hyperbolic(2), G.hyperbolic(4)])
def test_log_derivative_against_central_differences(m):
    rng = np.random.default_rng(1)
    r = rng.uniform(0.3, 8.0, 100)
    eps = 1e-6 * r
    fd = (np.log(G.area_density(m, r + eps)) - np.log(G.area_density(m, r - eps))) / (2 * eps)
    assert_allclose(G.log_area_derivative(m, r), fd, rtol=1e-8)


@given(st.floats(0.05, 10.0), st.integers(2, 6))
def test_warped_area_identity(r, n):
    rr = np.linspace(0.01, 12, 400)
    sigma = G.RadialTable.sample(np.sinh, rr)
    m = G.ManifoldSpec("full", n, "custom", sigma=sigma)
    assert_allclose(G.area_density(m, r), G.sphere_area(n) * G.warp(m, r) ** (n - 1), rtol=1e-12)


def test_decay_hypothesis_table():
    for n in range(2, 7):
        rep = G.decay_hypothesis_check(G.euclidean(n), 512)
        assert rep.integral_condition == (n >= 3)
        assert rep.growth_condition
    for n in range(2, 5):
        rep = G.decay_hypothesis_check(G.hyperbolic(n), 512)
        assert rep.integral_condition and rep.growth_condition


def test_decay_check_rejects_short_range():
    with pytest.raises(DomainError):
        G.decay_hypothesis_check(G.euclidean(3), 5.0)


def test_mu_profile_examples():
    assert_allclose(G.mu_profile(G.euclidean(2), R.son_rep(2, 1), 2.0), 0.5)
    tube = G.ManifoldSpec("tube", 2, "custom",
                          sigma=G.RadialTable(np.array([-50.0, 50.0]), np.array([1.0, 1.0])))
    rep = type("Rep", (), {"mu_sq": 9.0})()
    assert_allclose(G.mu_profile(tube, rep, np.array([-3.0, 0.0, 7.0])), 3.0)
    assert_allclose(G.mu_profile(G.hyperbolic(2), R.son_rep(2, 1), 1.0), 1 / math.sinh(1.0))


def test_mu_profile_needs_warp_or_table():
    tab = G.RadialTable(np.array([1.0, 2.0, 4.0]), np.array([1.0, 3.0, 5.0]))
    m = G.ManifoldSpec("exterior", 2, "custom", table=tab)
    with pytest.raises(ConfigurationError):
        G.mu_profile(m, R.son_rep(2, 1), 2.0)


def test_table_validation():
    with pytest.raises(ConfigurationError):
        G.RadialTable(np.array([1.0, 1.0]), np.array([1.0, 2.0]))
    with pytest.raises(ConfigurationError):
        G.RadialTable(np.array([1.0, 2.0]), np.array([1.0, -2.0]))
    with pytest.raises(ConfigurationError):
        G.RadialTable(np.array([1.0]), np.array([1.0]))


def test_load_manifold_round_trip():
    doc = {"interval": "exterior", "n": 2, "area": "euclidean", "delta": 0.0}
    m = G.load_manifold(json.dumps(doc))
    assert m.interval is G.IntervalKind.EXTERIOR
    assert G.load_manifold(m.to_json()).to_json() == m.to_json()
    with pytest.raises(ConfigurationError):
        G.load_manifold("{not json")
    with pytest.raises(ConfigurationError):
        G.load_manifold({"interval": "moon", "n": 2})
    with pytest.raises(ConfigurationError):
        G.preset("nowhere")


def test_presets():
    assert set(G.PRESETS) == {"r2", "r3", "r4", "h2", "extball2"}
    assert G.preset("h2").delta == 0.25
    assert G.preset("extball2").interval is G.IntervalKind.EXTERIOR
