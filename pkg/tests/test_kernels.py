import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from vortexlab import geometry, kernels, profile_solver as ps, representations as reps
from vortexlab.grid import RadialGrid

IMPLS = kernels.implementations()
needs_compiled = pytest.mark.skipif("compiled" not in IMPLS, reason="extension not built")


def test_python_backend_always_available():
    assert "python" in IMPLS
    assert kernels.BACKEND in IMPLS


def test_env_var_selects_python():
    code = "import vortexlab.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, VORTEXLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


@given(st.integers(3, 60), st.integers(0, 2 ** 31 - 1))
def test_tridiagonal_solves(n, seed):
    rng = np.random.default_rng(seed)
    sub, sup = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    diag = 3.0 + rng.uniform(0, 1, n)
    rhs = rng.standard_normal(n)
    dense = np.diag(diag) + np.diag(sub[1:], -1) + np.diag(sup[:-1], 1)
    for impl in IMPLS.values():
        assert_allclose(dense @ impl.solve_tridiagonal(sub, diag, sup, rhs), rhs, atol=1e-12)


def _bands(nodes, ell):
    g = RadialGrid.build(geometry.euclidean(2), float(ell ** 2), 20.0 / nodes, 20.0)
    return g, tuple(np.ascontiguousarray(b) for b in g.operator_bands())


@needs_compiled
@given(st.floats(0.0, 2.5), st.floats(1e-4, 5e-2), st.sampled_from([2.0, 3.0, 4.5]),
       st.integers(0, 2))
def test_midpoint_backends_agree(amp, dt, p, ell):
    g, (sub, diag, sup) = _bands(400, ell)
    v = (amp * g.r ** ell * np.exp(-g.r ** 2) * np.exp(0.3j * g.r)).astype(complex)
    a = IMPLS["python"].midpoint_step(sub, diag, sup, v, dt, p, 1.0, 1e-12, 30)
    b = IMPLS["compiled"].midpoint_step(sub, diag, sup, v, dt, p, 1.0, 1e-12, 30)
    assert a[2] == b[2]
    assert_allclose(a[0], b[0], atol=1e-12 * max(amp, 1.0))


def test_midpoint_linear_is_unitary():
    g, (sub, diag, sup) = _bands(400, 1)
    v = (g.r * np.exp(-g.r ** 2)).astype(complex)
    for impl in IMPLS.values():
        out, its, ok = impl.midpoint_step(sub, diag, sup, v, 0.05, 3.0, 0.0, 1e-12, 30)
        assert ok and its == 1
        assert_allclose(g.mass(out), g.mass(v), rtol=1e-13)


@needs_compiled
@pytest.mark.parametrize("n,ell,manifold", [
    (2, 0, "euclidean"), (2, 2, "euclidean"), (3, 1, "euclidean"), (2, 1, "hyperbolic"),
])
def test_shoot_backends_agree(n, ell, manifold):
    m = geometry.euclidean(n) if manifold == "euclidean" else geometry.hyperbolic(n)
    prob = ps.ProfileProblem(m, reps.son_rep(n, ell), 3.0, 1.0, h=0.01)
    prof = ps.bisect_ground(prob)
    kind, tr, ta, tm = ps._coefficient_setup(prob)
    r0, psi0, dpsi0 = ps._start(prob, prof.shoot_amplitude)
    grid = np.ascontiguousarray(prob.radial_grid().r)
    outs = {}
    for key, impl in IMPLS.items():
        out_psi, out_dpsi = np.zeros(grid.size), np.zeros(grid.size)
        status = impl.shoot(kind, float(n - 1), float(prob.mu_sq), 1.0, 3.0, 1.0, r0, psi0,
                            dpsi0, grid, tr, ta, tm, ps.RTOL, ps.ATOL, 1e-3 * r0, True, 0.0,
                            1e6, out_psi, out_dpsi)
        outs[key] = (status, out_psi)
    assert outs["python"][0][:2] == outs["compiled"][0][:2]
    assert_allclose(outs["python"][1], outs["compiled"][1], rtol=1e-12, atol=1e-14)
