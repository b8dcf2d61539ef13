from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from vortexlab import representations as R
from vortexlab.errors import ConfigurationError, ValidationError

HP = R.HarmonicPolynomial


def poly(*terms):
    """poly(((a, b, c, d), coeff), ...) with real integer coefficients."""
    return HP({e: (Fraction(c), Fraction(0)) for e, c in terms})


def jm_pairs(j_max):
    return [(j, m) for j in range(1, j_max + 1) for m in range(-j, j + 1, 2)]


def test_sphere_mu_sq_examples():
    for n in range(2, 7):
        assert R.sphere_mu_sq(n, 0) == 0
    assert R.sphere_mu_sq(2, 3) == 9
    assert R.sphere_mu_sq(4, 1) == 3


def test_rep_specs():
    r = R.son_rep(3, 2)
    assert (r.mu_sq, r.dim_V, r.dim_V0) == (6, 5, 1)
    assert R.son_rep(2, 3).dim_V0 == 1
    s = R.su2_rep(3)
    assert s.dim_V == s.dim_V0 == 4
    u = R.u2_rep(4, 2)
    assert u.dim_V0 == 1 and u.mu_sq == 4 * 6
    p = R.so4_pair_rep(3, 3)
    assert (p.dim_V, p.dim_V0) == (16, 1)
    assert R.so4_pair_rep(2, 4).dim_V0 == 0


def test_require_scalar():
    assert R.require_scalar(R.u2_rep(2, 0)).dim_V0 == 1
    with pytest.raises(ConfigurationError):
        R.require_scalar(R.su2_rep(2))
    with pytest.raises(ConfigurationError):
        R.require_scalar(R.so4_pair_rep(2, 0))


def test_clebsch_gordan_examples():
    assert R.clebsch_gordan_decompose(1, 1) == [0, 1]
    assert R.clebsch_gordan_decompose(0, 0) == [0]
    assert R.clebsch_gordan_decompose(2, 4) == [1, 2, 3]


@pytest.mark.parametrize("j", range(11))
def test_clebsch_gordan_dimension_sums(j):
    for k in range(11):
        ds = R.clebsch_gordan_decompose(j, k)
        assert sum(2 * d + 1 for d in ds) == (j + 1) * (k + 1)


def test_pairing_admissibility_exhaustive():
    for j in range(9):
        for k in range(9):
            if (j - k) % 2:
                with pytest.raises(ValidationError):
                    R.so4_pairing_admissible(j, k)
                continue
            adm = R.so4_pairing_admissible(j, k)
            assert adm == (0 in R.clebsch_gordan_decompose(j, k)) == (j == k)


def test_laplacian_examples():
    z1 = HP.monomial(1, 0, 0, 0)
    assert R.laplacian_euclidean(z1).is_zero()
    assert R.laplacian_euclidean(poly(((1, 1, 0, 0), 1), ((0, 0, 1, 1), -1))).is_zero()
    for j in range(2, 7):
        p = poly(((j - 1, 1, 0, 0), 1), ((j - 2, 0, 1, 1), -(j - 1)))
        assert R.laplacian_euclidean(p).is_zero()
    # |z|^2 = |z1|^2 + |z2|^2 has Laplacian 2 n = 8 on R^4
    lap = R.laplacian_euclidean(poly(((1, 1, 0, 0), 1), ((0, 0, 1, 1), 1)))
    assert lap == poly(((0, 0, 0, 0), 8))


def test_generator_examples():
    assert R.u2_invariant_generator(1, 1) == HP.monomial(1, 0, 0, 0)
    g20 = R.u2_invariant_generator(2, 0)
    ref = poly(((1, 1, 0, 0), 1), ((0, 0, 1, 1), -1))
    assert g20 == ref or g20 == ref.scale(-1)
    assert R.u2_invariant_generator(4, 2) == poly(((3, 1, 0, 0), 1), ((2, 0, 1, 1), -3))


@pytest.mark.parametrize("j,m", jm_pairs(6))
def test_generators_harmonic_homogeneous_charged(j, m):
    p = R.u2_invariant_generator(j, m)
    assert not p.is_zero()
    assert p.is_harmonic()
    assert R.laplacian_euclidean(p).is_zero()
    assert p.degrees() == {j}
    assert p.charges() == {m}


def test_negative_charge_is_conjugate():
    assert R.u2_invariant_generator(3, -1) == R.u2_invariant_generator(3, 1).conjugate()


@given(st.integers(1, 5).flatmap(lambda j: st.tuples(st.just(j), st.sampled_from(range(-j, j + 1, 2)))),
       st.floats(-np.pi, np.pi))
def test_generator_charge_numerically(jm, theta):
    j, m = jm
    p = R.u2_invariant_generator(j, m)
    z = np.array([0.3 + 0.7j, -0.4 + 0.2j])
    lhs = p(*(np.exp(1j * theta) * z))
    assert_allclose(lhs, np.exp(1j * m * theta) * p(*z), atol=1e-12)


def test_decomposition_dims():
    assert R.h_decomposition_dims(1) == [(-1, 2), (1, 2)]
    assert R.h_decomposition_dims(2) == [(-2, 3), (0, 3), (2, 3)]
    d3 = R.h_decomposition_dims(3)
    assert len(d3) == 4 and sum(d for _, d in d3) == 16
    for j, m in jm_pairs(5):
        assert R.harmonic_block_dim(j, m) == j + 1


def test_bad_jm():
    with pytest.raises(ValidationError):
        R.u2_invariant_generator(3, 0)
    with pytest.raises(ValidationError):
        R.u2_invariant_generator(2, 4)


@pytest.mark.parametrize("j,m", jm_pairs(4))
def test_sphere_eigenvalue(j, m):
    p = R.u2_invariant_generator(j, m)
    assert R.sphere_eigen_check(p) < 1e-3


def test_polynomial_json():
    doc = R.u2_invariant_generator(2, 0).to_json()
    assert all(set(t) == {"exps", "re", "im"} and len(t["exps"]) == 4 for t in doc)
