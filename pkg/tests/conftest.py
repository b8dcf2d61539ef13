import functools

import pytest
from hypothesis import HealthCheck, settings

from vortexlab import geometry, profile_solver as ps, representations as reps
from vortexlab import variational as var

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def ground(n=2, ell=0, p=3.0, lam=1.0, h=0.005):
    prob = ps.ProfileProblem(geometry.euclidean(n), reps.son_rep(n, ell), p, lam, h=h)
    return ps.bisect_ground(prob)


@functools.lru_cache(maxsize=None)
def flambda(n=2, ell=0, p=3.0, lam=1.0, beta=1.0, h=0.005):
    prob = ps.ProfileProblem(geometry.euclidean(n), reps.son_rep(n, ell), p, lam, h=h)
    return var.flambda_minimize(prob, beta)


@functools.lru_cache(maxsize=None)
def weinstein(n=2, ell=0, h=0.005):
    p = var.mass_critical(n)
    prob = ps.ProfileProblem(geometry.euclidean(n), reps.son_rep(n, ell), p, 1.0, h=h)
    return var.weinstein_sup(prob)


@pytest.fixture(scope="session")
def cached():
    """Memoised solvers shared across test modules."""
    class Cache:
        pass

    c = Cache()
    c.ground = ground
    c.flambda = flambda
    c.weinstein = weinstein
    return c
