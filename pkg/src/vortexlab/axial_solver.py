"""Axial vortices on R^{n+k}: the reduced PDE in (r, y) for k = 1.

With ``u(x, y) = psi(|x|, y) pi(g) phi`` the problem lives on the half
plane ``r > 0``, ``y`` real, with volume element ``A_n r^{n-1} dr dy``:

    d_r^2 psi + d_y^2 psi + (n-1)/r d_r psi - mu^2/r^2 psi - lam psi + |psi|^{p-1} psi = 0.

The grid is cell-centred in r (nodes (i + 1/2) h_r, so the axis face has
zero area and mu^2/r^2 is never evaluated at r = 0) and node-centred in y
with Dirichlet rows at y = +-Y and at r = R + h_r/2.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .errors import ConfigurationError, ConstraintViolation, ValidationError
from .geometry import sphere_area
from .profile_solver import indicial_exponent
from .representations import RepSpec, require_scalar
from . import variational as var

AXV1_MAGIC = b"AXV1"


@dataclass(frozen=True, eq=False)
class AxialProblem:
    n: int
    rep: RepSpec | None
    p: float
    lam: float
    R: float = 14.0
    Y: float = 14.0
    nr: int = 256
    ny: int = 512
    k: int = 1
    mu_sq_override: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError("n must be an integer >= 2")
        if self.k != 1:
            raise ConfigurationError("only k = 1 axial direction is implemented")
        if self.rep is not None:
            require_scalar(self.rep)
        d = self.n + self.k
        crit = (d + 2) / (d - 2) if d > 2 else math.inf
        if not 1 < self.p < crit:
            raise ConstraintViolation(f"need 1 < p < {crit:g} on R^{d}, got {self.p}")
        if not self.lam > 0:
            raise ConstraintViolation("axial problems need lambda > 0")
        if self.Y < 12.0 / math.sqrt(self.lam):
            raise ValidationError(f"Y = {self.Y} too short; need Y >= 12/sqrt(lambda)")
        if self.nr < 4 or self.ny < 4 or self.R <= 0:
            raise ValidationError("grid too small")

    @property
    def mu_sq(self) -> float:
        if self.mu_sq_override is not None:
            return float(self.mu_sq_override)
        return 0.0 if self.rep is None else float(self.rep.mu_sq)

    def grid(self) -> "AxialGrid":
        return AxialGrid(self.n, self.mu_sq, self.R, self.Y, self.nr, self.ny)


class AxialGrid:
    """Discrete space on the (r, y) tensor grid; vectors are flattened C-order
    arrays of shape (nr, ny)."""

    def __init__(self, n, mu_sq, R, Y, nr, ny):
        self.n, self.mu_sq = int(n), float(mu_sq)
        self.nr, self.ny = int(nr), int(ny)
        self.hr = R / nr
        self.hy = 2.0 * Y / (ny + 1)
        self.r = (np.arange(nr) + 0.5) * self.hr
        self.y = -Y + (np.arange(ny) + 1.0) * self.hy
        an = sphere_area(n)
        self.area_c = an * self.r ** (n - 1)
        faces = np.arange(nr + 1) * self.hr
        self.area_f = an * faces ** (n - 1)
        self.w2 = np.outer(self.area_c * self.hr, np.full(ny, self.hy))
        self.weights = self.w2.ravel()
        self.mu2 = self.mu_sq / self.r ** 2
        self._lu = {}

    @property
    def shape(self):
        return (self.nr, self.ny)

    def _split(self, psi):
        """(radial, axial, angular) energy densities summed; the three
        pieces of the quadratic form."""
        u = psi.reshape(self.shape)
        cr = (self.area_f[1:-1] * self.hy / self.hr)[:, None]
        radial = np.sum(cr * np.diff(u, axis=0) ** 2)
        radial += np.sum(self.area_f[-1] * self.hy / self.hr * u[-1, :] ** 2)
        cy = (self.area_c * self.hr / self.hy)[:, None]
        axial = np.sum(cy * np.diff(u, axis=1) ** 2)
        axial += np.sum(cy[:, 0] * (u[:, 0] ** 2 + u[:, -1] ** 2))
        angular = np.sum(self.mu2[:, None] * self.w2 * u ** 2)
        return float(radial), float(axial), float(angular)

    def kinetic_parts(self, psi):
        radial, axial, angular = self._split(psi)
        return radial + axial, angular

    def apply_stiffness(self, psi):
        u = psi.reshape(self.shape)
        out = self.mu2[:, None] * self.w2 * u
        cr = (self.area_f[1:-1] * self.hy / self.hr)[:, None]
        fr = cr * np.diff(u, axis=0)
        out[:-1, :] -= fr
        out[1:, :] += fr
        out[-1, :] += self.area_f[-1] * self.hy / self.hr * u[-1, :]
        cy = (self.area_c * self.hr / self.hy)[:, None]
        fy = cy * np.diff(u, axis=1)
        out[:, :-1] -= fy
        out[:, 1:] += fy
        out[:, 0] += cy[:, 0] * u[:, 0]
        out[:, -1] += cy[:, 0] * u[:, -1]
        return out.ravel()

    def assemble_stiffness(self):
        """Sparse S from 1D factors via Kronecker products (independent of
        ``apply_stiffness``)."""
        nr, ny = self.shape
        cf = self.area_f / self.hr
        dr = sparse.diags(
            [cf[:-1] + cf[1:], -cf[1:-1], -cf[1:-1]], [0, -1, 1], shape=(nr, nr))
        my = sparse.identity(ny) * self.hy
        dy = sparse.diags(
            [np.full(ny, 2.0), -np.ones(ny - 1), -np.ones(ny - 1)], [0, -1, 1],
            shape=(ny, ny)) / self.hy
        mr = sparse.diags(self.area_c * self.hr)
        ang = sparse.diags(self.mu2 * self.area_c * self.hr)
        return (sparse.kron(dr, my) + sparse.kron(mr, dy) + sparse.kron(ang, my)).tocsc()

    def precond(self, shift):
        if shift not in self._lu:
            mat = self.assemble_stiffness() + sparse.diags(shift * self.weights)
            self._lu[shift] = splu(mat.tocsc())
        lu = self._lu[shift]
        return lambda rhs: lu.solve(np.asarray(rhs, dtype=float))

    def mass(self, psi) -> float:
        return float(np.sum(self.weights * psi * psi))

    def lp(self, psi, q) -> float:
        return float(np.sum(self.weights * np.abs(psi) ** q))


@dataclass(eq=False)
class AxialSolution:
    r: np.ndarray
    y: np.ndarray
    psi: np.ndarray
    lam: float
    mu_sq: float
    p: float
    n: int
    mass: float
    lp_norm: float
    kinetic_radial_axial: float
    kinetic_angular: float
    residual_norm: float
    lagrange_K: float
    value: float
    beta: float
    iterations: int
    converged: bool
    meta: dict = field(default_factory=dict)

    @property
    def kinetic_total(self) -> float:
        return self.kinetic_radial_axial + self.kinetic_angular

    def metadata(self) -> dict:
        doc = {
            "n": self.n, "k": 1, "lambda": self.lam, "mu_sq": self.mu_sq, "p": self.p,
            "nr": int(self.r.size), "ny": int(self.y.size),
            "mass": self.mass, "lp_norm": self.lp_norm,
            "kinetic_radial_axial": self.kinetic_radial_axial,
            "kinetic_angular": self.kinetic_angular, "residual_norm": self.residual_norm,
            "lagrange_K": self.lagrange_K, "I": self.value, "beta": self.beta,
            "iterations": self.iterations, "converged": self.converged,
        }
        doc.update(self.meta)
        return doc


def _guess(grid: AxialGrid, lam, shift_y=0.0):
    s = indicial_exponent(grid.n, grid.mu_sq)
    w = 1.5 / math.sqrt(lam)
    R, Yc = np.meshgrid(grid.r, grid.y - shift_y, indexing="ij")
    return (R ** s * np.exp(-(R ** 2 + Yc ** 2) / w ** 2)).ravel()


def axial_minimize(prob: AxialProblem, beta: float = 1.0, shift_y: float = 0.0,
                   el_tol: float = 1e-9, max_iter: int = 5000) -> AxialSolution:
    """Minimise F_lam = T + lam M at J = beta; returned psi is the K = 1
    solution u = K^{1/(p-1)} psi_min of the reduced PDE."""
    if not beta > 0:
        raise ValidationError("beta must be positive")
    grid = prob.grid()
    p, lam = prob.p, prob.lam

    def objective(psi):
        return var.functional("flambda", grid, psi, p, lam)

    def residual(psi):
        K = objective(psi)[0] / beta
        return var.normalized_residual(grid, psi, lam, K, p)

    psi, f, its, conv, _ = var.constrained_descent(
        grid, objective, "lp", beta, p, _guess(grid, lam, shift_y), residual, lam,
        el_tol, max_iter)
    K = f / beta
    a = K ** (1.0 / (p - 1.0))
    u = a * psi
    ra, ang = grid.kinetic_parts(u)
    sol = AxialSolution(
        grid.r.copy(), grid.y.copy(), u.reshape(grid.shape), lam, grid.mu_sq, p, prob.n,
        grid.mass(u), grid.lp(u, p + 1), ra, ang, 0.0, K, f, beta, its, conv)
    sol.residual_norm = axial_residual(sol, prob)
    return sol


def axial_residual(sol: AxialSolution, prob: AxialProblem) -> float:
    """Weighted L^2 norm of the reduced-PDE residual (K = 1 form)."""
    grid = prob.grid()
    if sol.psi.shape != grid.shape:
        raise ValidationError(f"solution shape {sol.psi.shape} != grid {grid.shape}")
    u = sol.psi.ravel()
    field_ = grid.apply_stiffness(u) / grid.weights + prob.lam * u - np.abs(u) ** (prob.p - 1) * u
    return float(np.sqrt(np.sum(grid.weights * field_ ** 2)))


def kinetic_crosscheck(sol: AxialSolution, prob: AxialProblem) -> float:
    """Relative gap between the bookkept kinetic fields and psi^T S psi with
    S assembled independently from Kronecker factors."""
    grid = prob.grid()
    u = sol.psi.ravel()
    full = float(u @ (grid.assemble_stiffness() @ u))
    return abs(sol.kinetic_total - full) / abs(full)


def sharp(sol: AxialSolution) -> AxialSolution:
    """u -> |psi| pi(g) phi."""
    out = AxialSolution(**{k: getattr(sol, k) for k in sol.__dataclass_fields__})
    out.psi = np.abs(sol.psi)
    out.meta = dict(sol.meta)
    return out


def recompute_norms(sol: AxialSolution, prob: AxialProblem) -> dict:
    grid = prob.grid()
    u = sol.psi.ravel()
    ra, ang = grid.kinetic_parts(u)
    return {"mass": grid.mass(u), "lp_norm": grid.lp(u, prob.p + 1),
            "kinetic_radial_axial": ra, "kinetic_angular": ang}


def write_csv(sol: AxialSolution, path):
    from . import io

    R, Y = np.meshgrid(sol.r, sol.y, indexing="ij")
    rows = zip(R.ravel().tolist(), Y.ravel().tolist(), sol.psi.ravel().tolist())
    return io.write_csv(path, ["r", "y", "psi"], rows)


def write_axv1(sol: AxialSolution, path):
    """Binary dump: 16-byte header (b'AXV1', u32 nr, u32 ny, u32 itemsize)
    then psi as little-endian float64 in column-major order."""
    from . import io

    nr, ny = sol.psi.shape
    header = AXV1_MAGIC + struct.pack("<III", nr, ny, 8)
    body = np.asfortranarray(sol.psi, dtype="<f8").tobytes(order="F")
    return io.atomic_write_bytes(path, header + body)


def read_axv1(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != AXV1_MAGIC:
        raise ValidationError("not an AXV1 file")
    nr, ny, size = struct.unpack("<III", data[4:16])
    if size != 8 or len(data) != 16 + nr * ny * 8:
        raise ValidationError("corrupt AXV1 payload")
    return np.frombuffer(data[16:], dtype="<f8").reshape((nr, ny), order="F").copy()
