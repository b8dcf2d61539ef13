"""Symmetry classes of vortices: angular eigenvalues and fixed-vector counts.

A class is a representation ``pi`` of the rotation group on a space ``V``
of spherical functions. Solvers need two numbers from it: the eigenvalue
``mu_sq`` of ``-Delta_S`` on ``V`` and ``dim V0``, the dimension of the
vectors fixed by the stabiliser of a base point. Only ``dim V0 == 1`` is
solved (the scalar reduced ODE).

For ``SO(4)``, ``SU(2)`` and ``U(2)`` acting on ``S^3 in C^2`` the spaces
are built from harmonic polynomials in ``(z1, z1bar, z2, z2bar)``. These
are kept with exact rational complex coefficients so harmonicity is an
equality check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError, InvariantViolation, ValidationError


class Group(str, Enum):
    SON = "SOn"
    SO4_PAIR = "SO4Pair"
    SU2 = "SU2"
    U2 = "U2"


@dataclass(frozen=True)
class RepSpec:
    group: Group
    label: tuple
    mu_sq: float
    dim_V: int
    dim_V0: int

    def __post_init__(self):
        if self.mu_sq < 0:
            raise ConfigurationError("mu_sq must be nonnegative")
        if not 0 <= self.dim_V0 <= self.dim_V:
            raise ConfigurationError("need 0 <= dim V0 <= dim V")

    @property
    def name(self) -> str:
        return f"{self.group.value}{self.label}"

    def to_json(self) -> dict:
        return {
            "group": self.group.value,
            "label": list(self.label),
            "mu_sq": self.mu_sq,
            "dim_V": self.dim_V,
            "dim_V0": self.dim_V0,
        }


def sphere_mu_sq(n: int, level: int) -> float:
    """Eigenvalue l(l+n-2) of -Delta on degree-l harmonics on S^{n-1}."""
    if n < 2 or level < 0:
        raise ValidationError("need n >= 2 and level >= 0")
    return float(level * (level + n - 2))


def _harmonic_dim(n: int, level: int) -> int:
    if n == 2:
        return 1  # complex character e^{i l theta}
    return math.comb(level + n - 1, n - 1) - (
        math.comb(level + n - 3, n - 1) if level >= 2 else 0
    )


def son_rep(n: int, level: int) -> RepSpec:
    """Degree-``level`` spherical harmonics on S^{n-1}; V0 is the zonal line."""
    return RepSpec(Group.SON, (n, level), sphere_mu_sq(n, level), _harmonic_dim(n, level), 1)


def so4_pair_rep(j: int, k: int) -> RepSpec:
    """D_{j/2} (x) D_{k/2} of SU(2) x SU(2), descending to SO(4)."""
    _check_so4_parity(j, k)
    a, b = j / 2.0, k / 2.0
    mu_sq = 2.0 * (a * (a + 1) + b * (b + 1))
    dim_v0 = 1 if j == k else 0
    return RepSpec(Group.SO4_PAIR, (j, k), mu_sq, (j + 1) * (k + 1), dim_v0)


def su2_rep(j: int) -> RepSpec:
    """SU(2) acting on H_{j,m}: every vector is fixed by the trivial stabiliser."""
    if j < 0:
        raise ValidationError("j must be >= 0")
    return RepSpec(Group.SU2, (j,), float(j * (j + 2)), j + 1, j + 1)


def u2_rep(j: int, m: int) -> RepSpec:
    """U(2) acting on H_{j,m}; the U(1) stabiliser fixes a line."""
    _check_jm(j, m)
    return RepSpec(Group.U2, (j, m), float(j * (j + 2)), j + 1, 1)


def require_scalar(rep: RepSpec) -> RepSpec:
    """Reject classes that the scalar solvers cannot handle."""
    if rep.dim_V0 == 0:
        raise ConfigurationError(f"{rep.name} has V0 = 0: no vortices in this class")
    if rep.dim_V0 > 1:
        raise ConfigurationError(
            f"{rep.name} has dim V0 = {rep.dim_V0}; only dim V0 = 1 is supported"
        )
    return rep


def clebsch_gordan_decompose(j: int, k: int) -> list:
    """Spins d in D_{j/2} (x) D_{k/2} = sum_d D_d, returned as Fractions."""
    if j < 0 or k < 0:
        raise ValidationError("j, k must be >= 0")
    lo, hi = abs(j - k), j + k
    return [Fraction(t, 2) for t in range(lo, hi + 1, 2)]


def _check_so4_parity(j: int, k: int):
    if j < 0 or k < 0:
        raise ValidationError("j, k must be >= 0")
    if (j - k) % 2:
        raise ValidationError(f"pi_{{{j},{k}}} is not an SO(4) representation (parity)")


def so4_pairing_admissible(j: int, k: int) -> bool:
    """True iff pi_{jk} has a nonzero vector fixed by the diagonal SO(3)."""
    _check_so4_parity(j, k)
    return Fraction(0) in clebsch_gordan_decompose(j, k)


def _check_jm(j: int, m: int):
    if j < 0 or abs(m) > j or (j - m) % 2:
        raise ValidationError(f"need |m| <= j and m = j mod 2, got j={j}, m={m}")


# exact polynomials in (z1, z1bar, z2, z2bar)

def _c(x) -> tuple:
    if isinstance(x, tuple):
        return (Fraction(x[0]), Fraction(x[1]))
    if isinstance(x, complex):
        return (Fraction(x.real), Fraction(x.imag))
    return (Fraction(x), Fraction(0))


class HarmonicPolynomial:
    """Sparse polynomial ``sum c_e z1^a z1bar^b z2^c z2bar^d``.

    Coefficients are pairs of Fractions (real, imaginary). The class is
    also used for non-harmonic intermediates; ``is_harmonic`` checks.
    """

    def __init__(self, terms=None):
        self.terms = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != 4 or min(exps) < 0:
                raise ValidationError(f"bad exponent tuple {exps}")
            re, im = _c(coef)
            if re or im:
                self.terms[exps] = (re, im)

    @classmethod
    def monomial(cls, a, b, c, d, coef=1):
        return cls({(a, b, c, d): coef})

    def __add__(self, other):
        out = dict(self.terms)
        for e, (re, im) in other.terms.items():
            r0, i0 = out.get(e, (Fraction(0), Fraction(0)))
            out[e] = (r0 + re, i0 + im)
        return HarmonicPolynomial(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        sr, si = _c(s)
        return HarmonicPolynomial(
            {e: (re * sr - im * si, re * si + im * sr) for e, (re, im) in self.terms.items()}
        )

    def __eq__(self, other):
        return isinstance(other, HarmonicPolynomial) and self.terms == other.terms

    def __repr__(self):
        return f"HarmonicPolynomial({self.terms!r})"

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {sum(e) for e in self.terms}

    @property
    def degree(self) -> int:
        degs = self.degrees()
        if len(degs) != 1:
            raise ValidationError("polynomial is not homogeneous")
        return degs.pop()

    def charges(self) -> set:
        """Weights m with p(e^{it} z) = e^{imt} p(z), one per monomial."""
        return {a - b + c - d for a, b, c, d in self.terms}

    def conjugate(self):
        return HarmonicPolynomial(
            {(b, a, d, c): (re, -im) for (a, b, c, d), (re, im) in self.terms.items()}
        )

    def is_harmonic(self) -> bool:
        return laplacian_euclidean(self).is_zero()

    def __call__(self, z1, z2):
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        out = np.zeros(np.broadcast(z1, z2).shape, dtype=complex)
        for (a, b, c, d), (re, im) in self.terms.items():
            out = out + complex(float(re), float(im)) * (
                z1 ** a * np.conj(z1) ** b * z2 ** c * np.conj(z2) ** d
            )
        return out

    def to_json(self) -> list:
        return [
            {"exps": list(e), "re": float(re), "im": float(im)}
            for e, (re, im) in sorted(self.terms.items(), reverse=True)
        ]


def laplacian_euclidean(p: HarmonicPolynomial) -> HarmonicPolynomial:
    """Exact Laplacian on R^4 = C^2 via Delta = 4 (d_z1 d_z1bar + d_z2 d_z2bar)."""
    out = {}

    def acc(e, re, im):
        r0, i0 = out.get(e, (Fraction(0), Fraction(0)))
        out[e] = (r0 + re, i0 + im)

    for (a, b, c, d), (re, im) in p.terms.items():
        if a and b:
            k = 4 * a * b
            acc((a - 1, b - 1, c, d), k * re, k * im)
        if c and d:
            k = 4 * c * d
            acc((a, b, c - 1, d - 1), k * re, k * im)
    return HarmonicPolynomial(out)


def _nullspace(rows, ncols) -> list:
    """Basis of the rational null space of a matrix given as lists of Fractions."""
    mat = [list(r) for r in rows]
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        pv = mat[row][col]
        mat[row] = [x / pv for x in mat[row]]
        for i in range(len(mat)):
            if i != row and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[row])]
        pivots.append(col)
        row += 1
        if row == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][fc]
        basis.append(v)
    return basis


def u2_invariant_generator(j: int, m: int) -> HarmonicPolynomial:
    """The harmonic element of span{z1^m |z1|^{2a} |z2|^{2b} : a + b = (j-|m|)/2}.

    Solved by exact elimination; the kernel must be a line. Normalised so
    the ``b = 0`` coefficient is 1. Negative ``m`` is the conjugate of ``-m``.
    """
    _check_jm(j, m)
    if m < 0:
        return u2_invariant_generator(j, -m).conjugate()
    top = (j - m) // 2
    family = [(m + a, a, top - a, top - a) for a in range(top, -1, -1)]  # b = top - a
    images = [laplacian_euclidean(HarmonicPolynomial.monomial(*e)) for e in family]
    keys = sorted({k for img in images for k in img.terms})
    rows = [[img.terms.get(k, (Fraction(0),))[0] for img in images] for k in keys]
    basis = _nullspace(rows, len(family)) if rows else [
        [Fraction(1)] * len(family)
    ]
    if len(basis) != 1:
        raise InvariantViolation(
            f"harmonic U(1)-invariants in H_{{{j},{m}}} span dimension {len(basis)}, expected 1"
        )
    vec = basis[0]
    vec = [x / vec[0] for x in vec]
    return HarmonicPolynomial({e: c for e, c in zip(family, vec)})


def h_decomposition_dims(j: int) -> list:
    """[(m, dim H_{j,m})] for m = -j, -j+2, ..., j.

    Homogeneous degree-j polynomials of charge m number
    ((j+m)/2 + 1)((j-m)/2 + 1); the Laplacian maps them onto the degree
    j-2 block of the same charge, leaving j + 1 harmonic ones.
    """
    if j < 1:
        raise ValidationError("j must be >= 1")
    out = []
    for m in range(-j, j + 1, 2):
        u, v = (j + m) // 2, (j - m) // 2
        out.append((m, (u + 1) * (v + 1) - u * v))
    return out


def harmonic_block_dim(j: int, m: int) -> int:
    """dim H_{j,m} by exact rank of the Laplacian on the charge-m block."""
    _check_jm(j, m)
    u, v = (j + m) // 2, (j - m) // 2
    family = [(a, b, u - a, v - b) for a in range(u + 1) for b in range(v + 1)]
    images = [laplacian_euclidean(HarmonicPolynomial.monomial(*e)) for e in family]
    keys = sorted({k for img in images for k in img.terms})
    if not keys:
        return len(family)
    rows = [[img.terms.get(k, (Fraction(0),))[0] for img in images] for k in keys]
    return len(_nullspace(rows, len(family)))


def sphere_laplacian_s3(p: HarmonicPolynomial, n_eta: int = 512, n_xi: int = 16):
    """Apply Delta on S^3 to p restricted to the sphere, numerically.

    Hopf coordinates z1 = cos(eta) e^{i xi1}, z2 = sin(eta) e^{i xi2}; the
    metric is d eta^2 + cos^2 d xi1^2 + sin^2 d xi2^2. Spectral in xi,
    second-order conservative differences in eta (the weight
    sin(eta) cos(eta) vanishes at both ends, so no boundary rows are
    needed). Returns (f, Delta_S f) on the grid.
    """
    h = 0.5 * math.pi / n_eta
    eta = (np.arange(n_eta) + 0.5) * h
    xi = 2.0 * math.pi * np.arange(n_xi) / n_xi
    E, X1, X2 = np.meshgrid(eta, xi, xi, indexing="ij")
    f = p(np.cos(E) * np.exp(1j * X1), np.sin(E) * np.exp(1j * X2))

    k = np.fft.fftfreq(n_xi, d=1.0 / n_xi)
    fh = np.fft.fft2(f, axes=(1, 2))
    d11 = np.fft.ifft2(-(k[None, :, None] ** 2) * fh, axes=(1, 2))
    d22 = np.fft.ifft2(-(k[None, None, :] ** 2) * fh, axes=(1, 2))

    faces = np.arange(n_eta + 1) * h
    wf = (np.sin(faces) * np.cos(faces))[:, None, None]
    wc = (np.sin(eta) * np.cos(eta))[:, None, None]
    flux = np.zeros((n_eta + 1,) + f.shape[1:], dtype=complex)
    flux[1:-1] = wf[1:-1] * np.diff(f, axis=0) / h
    d_eta = np.diff(flux, axis=0) / (h * wc)
    lap = d_eta + d11 / np.cos(E) ** 2 + d22 / np.sin(E) ** 2
    return f, lap


def sphere_eigen_check(p: HarmonicPolynomial, n: int = 4, **grid) -> float:
    """Relative L^2(S^3) error of Delta_S p = -j(j+2) p."""
    if n != 4:
        raise ValidationError("the numerical sphere check is implemented on S^3 only")
    j = p.degree
    f, lap = sphere_laplacian_s3(p, **grid)
    n_eta = f.shape[0]
    eta = (np.arange(n_eta) + 0.5) * (0.5 * math.pi / n_eta)
    w = (np.sin(eta) * np.cos(eta))[:, None, None]
    err = lap + sphere_mu_sq(n, j) * f
    return float(np.sqrt(np.sum(w * np.abs(err) ** 2) / np.sum(w * np.abs(f) ** 2)))
