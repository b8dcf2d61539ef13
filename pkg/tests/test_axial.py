import numpy as np
import pytest
from numpy.testing import assert_allclose

from vortexlab import axial_solver as ax
from vortexlab import geometry as G
from vortexlab import profile_solver as ps
from vortexlab import representations as R
from vortexlab.errors import ConfigurationError, ConstraintViolation, ValidationError

_SOL = {}


def problem(ell=0, nr=120, ny=240, L=12.0, **kw):
    return ax.AxialProblem(2, R.son_rep(2, ell), 3.0, 1.0, R=L, Y=L, nr=nr, ny=ny, **kw)


def solved(ell=0, nr=120, ny=240):
    key = (ell, nr, ny)
    if key not in _SOL:
        prob = problem(ell, nr, ny)
        _SOL[key] = (prob, ax.axial_minimize(prob))
    return _SOL[key]


def test_problem_validation():
    with pytest.raises(ConstraintViolation):
        ax.AxialProblem(2, None, 5.0, 1.0)
    with pytest.raises(ConstraintViolation):
        ax.AxialProblem(2, None, 3.0, 0.0)
    with pytest.raises(ValidationError):
        ax.AxialProblem(2, None, 3.0, 1.0, Y=5.0)
    with pytest.raises(ConfigurationError):
        ax.AxialProblem(2, None, 3.0, 1.0, k=2)
    with pytest.raises(ConfigurationError):
        ax.AxialProblem(4, R.su2_rep(2), 3.0, 1.0)


@pytest.mark.parametrize("ell", [0, 1])
def test_converged_solution(ell):
    prob, sol = solved(ell)
    assert sol.converged
    assert sol.residual_norm < 1e-4
    assert sol.psi.min() > 0
    assert ax.kinetic_crosscheck(sol, prob) < 1e-10
    assert_allclose(sol.lagrange_K, sol.value / sol.beta)


def test_vortex_has_more_energy():
    assert solved(1)[1].value > solved(0)[1].value


def test_k_collapse():
    prob, sol = solved(0, 240, 480)
    ref = ps.bisect_ground(ps.ProfileProblem(G.euclidean(3), None, 3.0, 1.0))
    rr = np.hypot(*np.meshgrid(sol.r, sol.y, indexing="ij"))
    expected = np.interp(rr, ref.r, ref.psi)
    assert np.max(np.abs(sol.psi - expected)) < 1e-2 * expected.max()


def test_translation_neutral():
    prob, sol = solved(0)
    shifted = ax.axial_minimize(prob, shift_y=1.5)
    assert abs(shifted.value - sol.value) < 1e-6 * sol.value


def test_residual_examples():
    prob, sol = solved(1)
    zero = ax.sharp(sol)
    zero.psi = np.zeros_like(sol.psi)
    assert ax.axial_residual(zero, prob) == 0
    bumped = ax.sharp(sol)
    i, j = np.unravel_index(np.argmax(sol.psi), sol.psi.shape)
    bumped.psi = sol.psi.copy()
    bumped.psi[i, j] += 1e-2
    assert ax.axial_residual(bumped, prob) > sol.residual_norm
    other = problem(1, nr=60, ny=120)
    with pytest.raises(ValidationError):
        ax.axial_residual(sol, other)


def test_sharp_is_identity_on_solution():
    prob, sol = solved(1)
    before = ax.recompute_norms(sol, prob)
    after = ax.recompute_norms(ax.sharp(sol), prob)
    for k, v in before.items():
        assert abs(after[k] - v) <= 1e-12 * abs(v)


def test_stored_norms_match_recompute():
    prob, sol = solved(0)
    norms = ax.recompute_norms(sol, prob)
    assert_allclose(norms["mass"], sol.mass, rtol=1e-14)
    assert_allclose(norms["kinetic_radial_axial"], sol.kinetic_radial_axial, rtol=1e-14)


def test_scaling_law():
    prob = problem(0, nr=60, ny=120)
    betas = np.array([0.5, 1.0, 2.0, 4.0])
    vals = np.array([ax.axial_minimize(prob, b).value for b in betas])
    slope = np.polyfit(np.log(betas), np.log(vals), 1)[0]
    assert abs(slope - 0.5) < 1e-2
    for b, v in zip(betas[1:], vals[1:]):
        half = ax.axial_minimize(prob, b / 2).value
        assert v < 2 * half


def test_axv1_round_trip(tmp_path):
    _, sol = solved(0)
    path = ax.write_axv1(sol, tmp_path / "u.axv1")
    data = path.read_bytes()
    assert data[:4] == b"AXV1" and len(data) == 16 + sol.psi.size * 8
    assert np.array_equal(ax.read_axv1(path), sol.psi)
    (tmp_path / "bad.axv1").write_bytes(b"XXXX" + data[4:])
    with pytest.raises(ValidationError):
        ax.read_axv1(tmp_path / "bad.axv1")


def test_csv_dump(tmp_path):
    from vortexlab import io

    _, sol = solved(0)
    header, rows = io.read_csv(ax.write_csv(sol, tmp_path / "u.csv"))
    assert header == ["r", "y", "psi"] and len(rows) == sol.psi.size
    assert float(rows[5][2]) == sol.psi.ravel()[5]
