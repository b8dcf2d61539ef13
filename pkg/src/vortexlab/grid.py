"""Uniform radial grids and the weighted finite-volume operators on them.

Every solver shares this discrete function space: nodes ``r_i`` with
spacing ``h``, cell weights ``W_i = A(r_i) h`` and face areas ``A(r_{i+1/2})``.
The quadratic form

    q(psi) = sum_faces A_f / h |psi_{i+1} - psi_i|^2 + sum_i mu(r_i)^2 W_i |psi_i|^2

is the discrete ``||grad u||^2`` of ``u = psi(r) pi(g) phi``; ``S`` denotes its
symmetric tridiagonal matrix and ``L = W^{-1} S`` the discrete ``-Delta``.

Boundary handling:

* full ray: nodes at ``(i + 1/2) h``; the face at the origin carries
  ``A(0) = 0`` so no flux condition is needed (regularity is natural).
* exterior ball: nodes at ``1 + (i + 1) h`` with a Dirichlet node at r = 1.
* tube: nodes at ``-R + (i + 1) h`` with Dirichlet nodes at both ends.

In all cases a Dirichlet node sits one spacing past the last node.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry, kernels
from .errors import ValidationError
from .geometry import IntervalKind, ManifoldSpec


@dataclass(frozen=True, eq=False)
class RadialGrid:
    manifold: ManifoldSpec
    mu_sq: float
    h: float
    r: np.ndarray
    weights: np.ndarray       # W_i = A(r_i) h
    face_area: np.ndarray     # A at faces i-1/2 .. N-1/2 (length N + 1)
    mu2: np.ndarray           # mu_pi(r_i)^2

    @classmethod
    def build(cls, manifold: ManifoldSpec, mu_sq: float, h: float, r_max: float) -> "RadialGrid":
        if h <= 0:
            raise ValidationError("grid spacing must be positive")
        kind = manifold.interval
        if kind is IntervalKind.FULL:
            n_nodes = int(round(r_max / h))
            r = (np.arange(n_nodes) + 0.5) * h
        elif kind is IntervalKind.EXTERIOR:
            n_nodes = int(round((r_max - 1.0) / h)) - 1
            r = 1.0 + (np.arange(n_nodes) + 1.0) * h
        else:
            n_nodes = int(round(2.0 * r_max / h)) - 1
            r = -r_max + (np.arange(n_nodes) + 1.0) * h
        if n_nodes < 4:
            raise ValidationError("grid has fewer than 4 nodes")
        faces = np.concatenate([[r[0] - 0.5 * h], r + 0.5 * h])
        face_area = np.empty_like(faces)
        if kind is IntervalKind.FULL:
            face_area[0] = 0.0
            face_area[1:] = geometry.area_density(manifold, faces[1:])
        else:
            face_area[:] = geometry.area_density(manifold, faces)
        weights = geometry.area_density(manifold, r) * h
        mu2 = geometry.mu_sq_profile(manifold, mu_sq, r)
        return cls(manifold, float(mu_sq), float(h), r, weights, face_area, mu2)

    @property
    def size(self) -> int:
        return self.r.size

    @property
    def n(self) -> int:
        return self.manifold.n

    def stiffness_bands(self):
        """(sub, diag, sup) of the symmetric matrix S."""
        c = self.face_area / self.h
        diag = c[:-1] + c[1:] + self.mu2 * self.weights
        off = -c[1:-1]
        sub = np.concatenate([[0.0], off])
        sup = np.concatenate([off, [0.0]])
        return sub, diag, sup

    def operator_bands(self):
        """(sub, diag, sup) of L = W^{-1} S, the discrete -Delta."""
        sub, diag, sup = self.stiffness_bands()
        w = self.weights
        return sub / w, diag / w, sup / w

    def apply_stiffness(self, psi):
        """S psi."""
        c = self.face_area / self.h
        out = self.mu2 * self.weights * psi
        flux = c[1:-1] * np.diff(psi)
        out[:-1] -= flux
        out[1:] += flux
        out[0] += c[0] * psi[0]
        out[-1] += c[-1] * psi[-1]
        return out

    def kinetic_parts(self, psi):
        """(radial, angular) pieces of the quadratic form, each >= 0."""
        c = self.face_area / self.h
        d = np.diff(psi)
        radial = (
            np.sum(c[1:-1] * np.abs(d) ** 2)
            + c[0] * abs(psi[0]) ** 2
            + c[-1] * abs(psi[-1]) ** 2
        )
        angular = np.sum(self.mu2 * self.weights * np.abs(psi) ** 2)
        return float(radial), float(angular)

    def quad_form(self, psi) -> float:
        radial, angular = self.kinetic_parts(psi)
        return radial + angular

    def mass(self, psi) -> float:
        return float(np.sum(self.weights * np.abs(psi) ** 2))

    def lp(self, psi, q: float) -> float:
        """sum W |psi|^q, the discrete int |u|^q."""
        return float(np.sum(self.weights * np.abs(psi) ** q))

    def wnorm(self, f) -> float:
        """Weighted L^2 norm sqrt(sum W |f|^2)."""
        return float(np.sqrt(np.sum(self.weights * np.abs(f) ** 2)))

    def dense_stiffness(self) -> np.ndarray:
        sub, diag, sup = self.stiffness_bands()
        return np.diag(diag) + np.diag(sub[1:], -1) + np.diag(sup[:-1], 1)

    def precond(self, shift: float):
        """Solver for (S + shift W) x = b, the Sobolev-gradient metric."""
        sub, diag, sup = self.stiffness_bands()
        diag = diag + shift * self.weights

        def solve(rhs):
            return kernels.solve_tridiagonal(sub, diag, sup, np.ascontiguousarray(rhs, dtype=float))

        return solve
