import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from vortexlab import geometry as G
from vortexlab import profile_solver as ps
from vortexlab import representations as R
from vortexlab import variational as var
from vortexlab.errors import ConfigurationError, ConstraintViolation, InvariantViolation, ValidationError


def problem(n=2, ell=0, p=3.0, lam=1.0, **kw):
    return ps.ProfileProblem(G.euclidean(n), R.son_rep(n, ell), p, lam, **kw)


def test_exponents():
    assert var.weinstein_exponents(2, 3.0) == (2.0, 2.0)
    for n in range(2, 6):
        a, b = var.weinstein_exponents(n, var.mass_critical(n))
        assert_allclose((a, b), (var.mass_critical(n) - 1, 2.0))


@given(st.integers(2, 5), st.floats(1.1, 3.0))
def test_exponent_homogeneity(n, p):
    a, b = var.weinstein_exponents(n, p)
    assert_allclose(a + b, p + 1)


def test_weinstein_value_invariances(cached):
    prof = cached.ground(2, 0)
    w = var.weinstein_value(prof, 3.0, 2)
    doubled = ps.Profile(prof.r, 2 * prof.psi, 2 * prof.dpsi, 1.0, 0.0, 3.0, prof.manifold)
    ps.profile_norms(doubled, prof.manifold, update=True)
    assert_allclose(var.weinstein_value(doubled, 3.0, 2), w, rtol=1e-12)
    dil = ps.rescale_lambda(prof, 2.5)
    assert_allclose(var.weinstein_value(dil, 3.0, 2), w, rtol=1e-6)
    zero = ps.Profile(prof.r, 0 * prof.psi, 0 * prof.dpsi, 1.0, 0.0, 3.0, prof.manifold)
    with pytest.raises(ValidationError):
        var.weinstein_value(zero, 3.0, 2)


@pytest.mark.parametrize("kind", ["flambda", "energy", "neglogw", "lp", "mass"])
@pytest.mark.parametrize("ell", [0, 2])
def test_gradient_check(kind, ell):
    space = problem(ell=ell, h=0.02).radial_grid()
    r = space.r
    psi = r ** ell * np.exp(-r ** 2 / 3) * (1 + 0.1 * np.sin(r))
    assert var.gradient_check(kind, space, psi, 3.0, lam=1.0, n_dirs=20, seed=3) < 1e-6


def test_flambda_identities(cached):
    for ell in (0, 1, 2):
        res = cached.flambda(2, ell)
        assert res.converged
        assert res.lagrange_K > 0
        assert_allclose(res.lagrange_K, res.value / res.constraint_value)
        assert res.residual < 1e-6
        assert np.all(res.minimizer.psi > 0)


def test_flambda_matches_shooting(cached):
    for ell in (0, 1, 2):
        u = var.normalized_minimizer(cached.flambda(2, ell))
        shot = cached.ground(2, ell)
        top = shot.psi.max()
        mask = shot.psi > 1e-3 * top
        assert np.max(np.abs(u.psi - shot.psi)[mask] / shot.psi[mask]) < 1e-3


def test_descent_monotone():
    space = problem(ell=1, h=0.02).radial_grid()

    def objective(psi):
        return var.functional("flambda", space, psi, 3.0, 1.0)

    def residual(psi):
        f = objective(psi)[0]
        return var.normalized_residual(space, psi, 1.0, f, 3.0)

    psi0 = space.r * np.exp(-space.r ** 2)
    *_, trace = var.constrained_descent(space, objective, "lp", 1.0, 3.0, psi0, residual, 1.0)
    vals = np.array(trace.values)
    assert np.all(np.diff(vals) <= 64 * np.finfo(float).eps * np.abs(vals[1:]))


def test_energy_minimizer():
    e = {}
    for ell, beta in ((0, 20.0), (0, 80.0), (1, 20.0)):
        res = var.energy_minimize(problem(ell=ell, p=2.0, h=0.01), beta)
        assert res.converged and res.residual < 1e-6
        e[ell, beta] = res
    assert e[0, 80.0].value < e[0, 20.0].value < 0
    assert e[1, 20.0].value > e[0, 20.0].value
    # infimum: below a feasible Gaussian test function
    space = problem(p=2.0, h=0.01).radial_grid()
    g = np.exp(-space.r ** 2)
    g *= math.sqrt(20.0 / space.mass(g))
    assert e[0, 20.0].value <= var.functional("energy", space, g, 2.0)[0]


def test_energy_rejects_critical_p():
    with pytest.raises(ConstraintViolation):
        var.energy_minimize(problem(p=3.0), 1.0)


@pytest.mark.parametrize("n,ell", [(2, 0), (2, 1), (3, 0), (3, 1)])
def test_weinstein_identities(cached, n, ell):
    res = cached.weinstein(n, ell)
    p = var.mass_critical(n)
    a, b = var.weinstein_exponents(n, p)
    assert res.converged and res.extra["routes_agree"]
    q = res.minimizer
    assert_allclose(q.lam, a / b, rtol=1e-3)
    assert_allclose(q.lp_norm, (p + 1) / 2 * q.kinetic_total, rtol=1e-3)
    assert_allclose(var.mass_threshold(res.value, p), math.sqrt(q.mass), rtol=1e-3)
    assert res.residual < 1e-6


def test_weinstein_needs_euclidean():
    with pytest.raises(ConfigurationError):
        var.weinstein_sup(ps.ProfileProblem(G.hyperbolic(2), None, 3.0, 1.0))


def test_mass_threshold():
    assert_allclose(var.mass_threshold(2.0, 3.0), 1.0)
    assert var.mass_threshold(0.1, 3.0) > var.mass_threshold(0.2, 3.0)
    with pytest.raises(ValidationError):
        var.mass_threshold(0.0, 3.0)


def test_sweep_euclidean():
    reps = [R.son_rep(2, ell) for ell in (3, 0, 2, 1)]
    rep = var.monotonicity_sweep(problem(), reps, beta=1.0, p_energy=2.0, beta_energy=20.0, workers=1)
    assert [r.mu_sq for r in rep.rows] == [0, 1, 4, 9]
    assert rep.monotone
    rep.check()
    assert len(var.monotonicity_sweep(problem(), [R.son_rep(2, 0)], workers=1).rows) == 1


def test_sweep_hyperbolic_table():
    r = np.linspace(0.01, 40, 4000)
    m = G.ManifoldSpec("full", 2, "custom", sigma=G.RadialTable.sample(np.sinh, r), delta=0.25)
    tmpl = ps.ProfileProblem(m, R.son_rep(2, 0), 3.0, 1.0, h=0.01)
    rep = var.monotonicity_sweep(tmpl, [R.son_rep(2, 0), R.son_rep(2, 1)], workers=1)
    assert rep.rows[1].I > rep.rows[0].I
    assert all(math.isnan(row.W) for row in rep.rows)


def test_sweep_alarm():
    rep = var.SweepReport([], ["W: fake"], 1e-3)
    with pytest.raises(InvariantViolation):
        rep.check()


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("VORTEXLAB_THREADS", "2")
    assert var.worker_count(16) == 2
    monkeypatch.setenv("VORTEXLAB_THREADS", "x")
    with pytest.raises(ConfigurationError):
        var.worker_count()


def test_scaling_and_subadditivity():
    rep = var.scaling_check(problem(h=0.01), [0.5, 1.0, 2.0, 4.0])
    assert abs(rep.slope - 0.5) < 1e-3
    assert abs(rep.intercept_ratio - 1) < 1e-3
    assert all(s[-1] for s in rep.subadditive)
    assert rep.ok


def test_grid_refinement(cached):
    coarse = var.flambda_minimize(problem(ell=1, h=0.01), 1.0).value
    fine = cached.flambda(2, 1).value
    assert abs(coarse - fine) / fine < 1e-3
