import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from vortexlab import geometry as G
from vortexlab import io
from vortexlab import profile_solver as ps
from vortexlab import representations as R
from vortexlab.errors import ConfigurationError, ConstraintViolation, NoGroundState

# mass of the n = 2 cubic ground state at lambda = 1 (Townes soliton), 2 pi * 1.86225...
TOWNES_MASS = 11.700896


def problem(n=2, ell=0, p=3.0, lam=1.0, **kw):
    return ps.ProfileProblem(G.euclidean(n), R.son_rep(n, ell), p, lam, **kw)


def test_indicial_examples():
    assert ps.indicial_exponent(3, 0.0) == 0.0
    for ell in range(6):
        assert_allclose(ps.indicial_exponent(2, ell ** 2), ell)
    assert_allclose(ps.indicial_exponent(4, 3.0), 1.0)


@given(st.integers(2, 8), st.floats(0.0, 100.0))
def test_indicial_root(n, mu_sq):
    s = ps.indicial_exponent(n, mu_sq)
    assert s >= 0
    assert abs(s * (s - 1) + (n - 1) * s - mu_sq) <= 1e-9 * max(1.0, mu_sq)


def test_shoot_classify_extremes():
    prob = problem(n=3)
    big = ps.shoot_classify(prob, 1e3)
    assert big.kind is not ps.Shot.DECAYS
    tiny = ps.shoot_classify(prob, 1e-12)
    assert tiny.kind is ps.Shot.DECAYS and tiny.trivial


def test_shoot_classify_at_ground_amplitude(cached):
    prof = cached.ground(2, 1)
    res = ps.shoot_classify(problem(ell=1), prof.shoot_amplitude)
    assert res.kind is ps.Shot.DECAYS and not res.trivial


def test_townes_mass(cached):
    prof = cached.ground(2, 0)
    assert_allclose(prof.mass, TOWNES_MASS, rtol=1e-4)
    assert prof.residual < 1e-6


def test_vortex_profile_l1(cached):
    p0, p1 = cached.ground(2, 0), cached.ground(2, 1)
    # psi ~ c r near the origin
    assert_allclose(p1.psi[:3] / p1.r[:3], p1.shoot_amplitude, rtol=1e-4)
    assert p1.mass > p0.mass


@pytest.mark.parametrize("ell", [0, 1, 2, 3])
def test_ground_invariants(cached, ell):
    prof = cached.ground(2, ell)
    assert np.all(prof.psi > 0)
    assert prof.psi[-1] < 1e-8 * prof.psi.max()
    crit = int(np.argmax(prof.psi))
    assert np.all(np.diff(prof.psi[crit:]) < 0)
    assert prof.residual < 1e-6
    assert_allclose(prof.kinetic_total, prof.kinetic_radial + prof.kinetic_angular)


def test_exterior_ball_profile():
    m = G.exterior_ball(2)
    prof = ps.bisect_ground(ps.ProfileProblem(m, R.son_rep(2, 0), 3.0, 1.0))
    assert prof.r[0] > 1.0 and prof.psi[0] < 0.05 * prof.psi.max()
    assert 0 < np.argmax(prof.psi) < prof.r.size - 1
    assert prof.psi[-1] < 1e-8 * prof.psi.max()
    assert prof.residual < 1e-6


def test_hyperbolic_profile_and_table():
    prob = ps.ProfileProblem(G.hyperbolic(2), R.son_rep(2, 1), 3.0, 1.0)
    prof = ps.bisect_ground(prob)
    assert np.all(prof.psi > 0) and prof.residual < 1e-6
    r = np.linspace(0.01, 40, 4000)
    tab = G.ManifoldSpec("full", 2, "custom", sigma=G.RadialTable.sample(np.sinh, r), delta=0.25)
    prof_t = ps.bisect_ground(prob.with_(manifold=tab))
    assert_allclose(prof_t.psi, prof.psi, atol=1e-3 * prof.psi.max())


@pytest.mark.parametrize("ell", [0, 1])
def test_residual_convergence_order(ell):
    res = [ps.bisect_ground(problem(ell=ell, h=h)).residual for h in (0.02, 0.01, 0.005)]
    assert res[0] / res[1] >= 4 and res[1] / res[2] >= 4


@pytest.mark.parametrize("n,lam,r_max", [(2, 1.0, 60.0), (2, 4.0, 30.0)])
def test_tail_slope(n, lam, r_max):
    prof = ps.bisect_ground(problem(n=n, lam=lam, r_max=r_max))
    k = prof.r.size - 40
    slope = (math.log(prof.psi[-3]) - math.log(prof.psi[k])) / (prof.r[-3] - prof.r[k])
    assert abs(slope + math.sqrt(lam)) < 0.01 * math.sqrt(lam)


def test_profile_norms_examples():
    m = G.euclidean(2)
    r = (np.arange(4000) + 0.5) * 0.002
    zero = ps.Profile(r, np.zeros_like(r), np.zeros_like(r), 1.0, 1.0, 3.0, m)
    out = ps.profile_norms(zero, m)
    assert all(out[k] == 0 for k in ("mass", "lp_norm", "kinetic_radial", "kinetic_angular"))
    g = np.exp(-r ** 2)
    gauss0 = ps.Profile(r, g, -2 * r * g, 1.0, 0.0, 3.0, m)
    out = ps.profile_norms(gauss0, m)
    assert out["kinetic_angular"] == 0
    assert_allclose(out["mass"], math.pi / 2, rtol=1e-5)
    assert_allclose(out["kinetic_radial"], math.pi, rtol=1e-5)
    gauss1 = ps.Profile(r, g, -2 * r * g, 1.0, 1.0, 3.0, m)
    out = ps.profile_norms(gauss1, m)
    assert out["angular_divergent"] and math.isinf(out["kinetic_angular"])


def test_rescale_lambda(cached):
    prof = cached.ground(2, 0)
    same = ps.rescale_lambda(prof, 1.0)
    assert_allclose(same.psi, prof.psi) and assert_allclose(same.r, prof.r)
    four = ps.rescale_lambda(prof, 4.0)
    assert abs(four.mass / prof.mass - 1) < 1e-10
    assert four.residual < 1e-5


@given(st.floats(0.25, 8.0))
def test_rescale_mass_exponent(lam_new):
    prof = _p5()
    out = ps.rescale_lambda(prof, lam_new)
    expected = lam_new ** (2 / (prof.p - 1) - prof.n / 2)
    assert_allclose(out.mass / prof.mass, expected, rtol=1e-10)


_P5 = {}


def _p5():
    if "p" not in _P5:
        _P5["p"] = ps.bisect_ground(problem(p=5.0, h=0.01))
    return _P5["p"]


def test_rescale_needs_euclidean():
    prof = ps.bisect_ground(ps.ProfileProblem(G.hyperbolic(2), None, 3.0, 1.0, h=0.01))
    with pytest.raises(ConfigurationError):
        ps.rescale_lambda(prof, 2.0)


def test_problem_validation():
    with pytest.raises(ConstraintViolation):
        problem(n=3, p=5.0)
    with pytest.raises(ConstraintViolation):
        ps.ProfileProblem(G.hyperbolic(2), None, 3.0, -0.3)
    ps.ProfileProblem(G.hyperbolic(2), None, 3.0, -0.2)
    with pytest.raises(ConfigurationError):
        ps.ProfileProblem(G.euclidean(4), R.su2_rep(2), 3.0, 1.0)
    tube = G.ManifoldSpec("tube", 2, "custom",
                          sigma=G.RadialTable(np.array([-50.0, 50.0]), np.array([1.0, 1.0])))
    with pytest.raises(ConfigurationError):
        ps.bisect_ground(ps.ProfileProblem(tube, None, 3.0, 1.0, r_max=10.0))


def test_short_domain_reports_no_ground_state():
    with pytest.raises(NoGroundState):
        ps.bisect_ground(problem(r_max=6.0))


def test_deterministic(cached):
    a = ps.bisect_ground(problem(ell=2))
    b = ps.bisect_ground(problem(ell=2))
    assert np.array_equal(a.psi, b.psi) and a.shoot_amplitude == b.shoot_amplitude


def test_write_profile(tmp_path, cached):
    prof = cached.ground(2, 1)
    csv_path, json_path = ps.write_profile(prof, tmp_path / "p")
    header, rows = io.read_csv(csv_path)
    assert header == ["r", "psi", "dpsi"]
    assert_allclose(np.array(rows, dtype=float)[:, 1], prof.psi, rtol=0, atol=0)
    meta = json.loads(json_path.read_text())
    for key in ("mass", "lp_norm", "kinetic_radial", "kinetic_angular", "lambda", "mu_sq",
                "shoot_amplitude", "el_residual"):
        assert key in meta
