"""Positive radial profiles of vortex standing waves by shooting.

The reduced equation is

    psi'' + a(r) psi' - (m(r) + lam) psi + |psi|^{p-1} psi = 0,

with ``a = A'/A`` and ``m = mu_pi(r)^2``. On the full ray the regular
solution starts as ``c r^s (1 + a2 r^2)`` with the indicial exponent ``s``;
on the exterior ball it starts from ``psi(1) = 0, psi'(1) = c``. The ground
profile is the separatrix between amplitudes whose trajectories turn back
up (Grows) and those that cross zero (CrossesZero).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.integrate import trapezoid

from . import geometry, kernels
from .errors import (
    ConfigurationError,
    ConstraintViolation,
    NoGroundState,
    StiffnessError,
    ValidationError,
)
from .geometry import AreaKind, IntervalKind, ManifoldSpec
from .grid import RadialGrid
from .representations import RepSpec, require_scalar

R_START = 1e-6
RTOL, ATOL = 1e-10, 1e-12
CLASSIFY_TAIL = 1e-6
MATCH_LEVEL = 1e-5


def indicial_exponent(n: int, mu_sq: float) -> float:
    """Nonnegative root of s(s-1) + (n-1)s - mu_sq = 0."""
    if n < 2 or mu_sq < 0:
        raise ValidationError("need n >= 2 and mu_sq >= 0")
    return 0.5 * (-(n - 2) + math.sqrt((n - 2) ** 2 + 4.0 * mu_sq))


def default_r_max(m: ManifoldSpec, mu_sq: float, lam: float) -> float:
    """(20 + 3s)/sqrt(lam + delta): vortex profiles peak further out as s grows."""
    decay = math.sqrt(max(lam, 0.0) + m.delta)
    s = indicial_exponent(m.n, mu_sq)
    base = 1.0 if m.interval is IntervalKind.EXTERIOR else 0.0
    return base + (20.0 + 3.0 * s) / decay


def check_exponent(m: ManifoldSpec, p: float):
    if not p > 1:
        raise ConstraintViolation(f"need p > 1, got {p}")
    if m.interval is IntervalKind.FULL and m.n >= 3:
        crit = (m.n + 2) / (m.n - 2)
        if not p < crit:
            raise ConstraintViolation(
                f"p = {p} is not H^1-subcritical for n = {m.n} (need p < {crit:g})"
            )


@dataclass(frozen=True, eq=False)
class ProfileProblem:
    manifold: ManifoldSpec
    rep: RepSpec | None
    p: float
    lam: float
    r_max: float | None = None
    h: float = 0.005
    mu_sq_override: float | None = None

    def __post_init__(self):
        m = self.manifold
        if self.rep is not None:
            require_scalar(self.rep)
        if self.mu_sq < 0:
            raise ValidationError("mu_sq must be nonnegative")
        check_exponent(m, self.p)
        if not self.lam + m.delta > 0:
            raise ConstraintViolation(
                f"need lambda > -delta, got lambda={self.lam}, delta={m.delta}"
            )
        if self.h <= 0:
            raise ValidationError("grid spacing must be positive")
        if self.r_max is None:
            object.__setattr__(self, "r_max", default_r_max(m, self.mu_sq, self.lam))
        if self.r_max <= 0:
            raise ValidationError("r_max must be positive")

    @property
    def mu_sq(self) -> float:
        if self.mu_sq_override is not None:
            return float(self.mu_sq_override)
        return 0.0 if self.rep is None else float(self.rep.mu_sq)

    @property
    def n(self) -> int:
        return self.manifold.n

    def radial_grid(self) -> RadialGrid:
        return RadialGrid.build(self.manifold, self.mu_sq, self.h, self.r_max)

    def with_(self, **kw) -> "ProfileProblem":
        return replace(self, **kw)


class Shot(str, Enum):
    DECAYS = "Decays"
    CROSSES_ZERO = "CrossesZero"
    GROWS = "Grows"


@dataclass
class ShotResult:
    kind: Shot
    c: float
    r_event: float
    psi: np.ndarray
    dpsi: np.ndarray
    n_filled: int
    psi_max: float
    status: int
    trivial: bool = False


@dataclass(eq=False)
class Profile:
    r: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    lam: float
    mu_sq: float
    p: float
    manifold: ManifoldSpec
    mass: float = 0.0
    lp_norm: float = 0.0
    kinetic_radial: float = 0.0
    kinetic_angular: float = 0.0
    shoot_amplitude: float = float("nan")
    residual: float = float("nan")
    angular_divergent: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def kinetic_total(self) -> float:
        return self.kinetic_radial + self.kinetic_angular

    @property
    def n(self) -> int:
        return self.manifold.n

    def metadata(self) -> dict:
        doc = {
            "lambda": self.lam,
            "mu_sq": self.mu_sq,
            "p": self.p,
            "n": self.n,
            "manifold": self.manifold.to_json(),
            "mass": self.mass,
            "lp_norm": self.lp_norm,
            "kinetic_radial": self.kinetic_radial,
            "kinetic_angular": self.kinetic_angular,
            "kinetic_total": self.kinetic_total,
            "shoot_amplitude": self.shoot_amplitude,
            "el_residual": self.residual,
            "angular_divergent": self.angular_divergent,
            "nodes": int(self.r.size),
        }
        doc.update(self.meta)
        return doc


# coefficient tables for manifolds without analytic ODE coefficients

_EMPTY = np.zeros(1)


def _coefficient_setup(prob: ProfileProblem):
    m = prob.manifold
    if m.interval is IntervalKind.TUBE:
        raise ConfigurationError("tube manifolds are handled by the variational solvers only")
    if m.mu_table is None and m.area is AreaKind.EUCLIDEAN:
        return 0, _EMPTY, _EMPTY, _EMPTY
    if m.mu_table is None and m.area is AreaKind.HYPERBOLIC:
        return 1, _EMPTY, _EMPTY, _EMPTY
    lo = 1.0 if m.interval is IntervalKind.EXTERIOR else 0.0
    step = min(prob.h / 4.0, 0.01)
    tr = lo + step * np.arange(1, int(math.ceil((prob.r_max + 2 * prob.h - lo) / step)) + 2)
    if m.interval is IntervalKind.EXTERIOR:
        tr = np.concatenate([[1.0], tr])
    ta = tr * geometry.log_area_derivative(m, tr)
    tm = tr ** 2 * geometry.mu_sq_profile(m, prob.mu_sq, tr)
    if m.interval is IntervalKind.FULL:
        # regular at the origin: r A'/A -> n-1 and r^2 mu^2 -> mu_sq
        tr = np.concatenate([[0.0], tr])
        ta = np.concatenate([[m.n - 1.0], ta])
        tm = np.concatenate([[prob.mu_sq], tm])
    return 2, tr, ta, tm


def _start(prob: ProfileProblem, c: float):
    if prob.manifold.interval is IntervalKind.EXTERIOR:
        return 1.0, 0.0, c
    n, p = prob.n, prob.p
    s = indicial_exponent(n, prob.mu_sq)
    nonlinear = c ** (p - 1.0) if s == 0.0 else 0.0
    a2 = (prob.lam - nonlinear) / (2.0 * (2.0 * s + n))
    r0 = R_START
    psi0 = c * r0 ** s * (1.0 + a2 * r0 * r0)
    if s == 0.0:
        dpsi0 = 2.0 * a2 * c * r0
    else:
        dpsi0 = c * (s * r0 ** (s - 1.0) + (s + 2.0) * a2 * r0 ** (s + 1.0))
    return r0, psi0, dpsi0


def _scale(prob: ProfileProblem) -> float:
    """Natural amplitude lam^{1/(p-1)} of the nonlinear balance."""
    lam = prob.lam if prob.lam > 0 else prob.lam + prob.manifold.delta
    return lam ** (1.0 / (prob.p - 1.0))


def _integrate(prob, c, grid_r, tail_tol, setup=None, g=1.0, start=None):
    kind, tr, ta, tm = setup if setup is not None else _coefficient_setup(prob)
    r0, psi0, dpsi0 = start if start is not None else _start(prob, c)
    out_psi = np.zeros(grid_r.size)
    out_dpsi = np.zeros(grid_r.size)
    atol = ATOL * min(1.0, max(abs(psi0), abs(dpsi0) * max(grid_r[0] - r0, 0.0), 1e-300)
                      / max(_scale(prob), 1e-300))
    status, nfill, r_ev, psi_max, _ = kernels.shoot(
        kind, float(prob.n - 1), float(prob.mu_sq), float(prob.lam), float(prob.p), g,
        r0, psi0, dpsi0, grid_r, tr, ta, tm, RTOL, atol, 1e-3 * max(r0, 1e-3),
        True, tail_tol, 1e6 * _scale(prob), out_psi, out_dpsi)
    if status == kernels.UNDERFLOW:
        raise StiffnessError(f"step size underflow at r = {r_ev:.6g}", r=r_ev)
    return status, nfill, r_ev, psi_max, out_psi, out_dpsi


def shoot_classify(prob: ProfileProblem, c: float, tail_tol: float = CLASSIFY_TAIL,
                   _setup=None, _grid=None) -> ShotResult:
    """Integrate from the regular start with amplitude ``c`` and classify.

    Trajectories on which the nonlinearity stays below ``tail_tol`` relative
    to lambda, i.e. (psi_max / scale)^{p-1} < tail_tol, follow the linearised
    equation; they are the psi = 0 limit and count as Decays.
    """
    if not c > 0:
        raise ValidationError("shooting amplitude must be positive")
    grid_r = _grid if _grid is not None else prob.radial_grid().r
    status, nfill, r_ev, psi_max, psi, dpsi = _integrate(prob, c, grid_r, tail_tol, _setup)
    trivial = False
    if status == kernels.CROSS:
        kind = Shot.CROSSES_ZERO
    elif status == kernels.DECAY:
        kind = Shot.DECAYS
    elif status == kernels.GROW:
        kind = Shot.GROWS
    else:
        kind = Shot.GROWS if dpsi[nfill - 1] > 0 else Shot.DECAYS
    if kind is Shot.GROWS and (psi_max / _scale(prob)) ** (prob.p - 1.0) < tail_tol:
        kind, trivial = Shot.DECAYS, True
    return ShotResult(kind, c, r_ev, psi, dpsi, nfill, psi_max, status, trivial)


def _bracket(prob, setup, grid_r):
    s = indicial_exponent(prob.n, prob.mu_sq) if prob.manifold.interval is IntervalKind.FULL else 1.0
    base = _scale(prob) * max(prob.lam, 1e-3) ** (0.5 * s)
    cs = base * np.logspace(-4.0, 4.0, 64)
    prev = None
    for c in cs:
        res = shoot_classify(prob, float(c), 0.0, setup, grid_r)
        if prev is not None and prev.kind is Shot.GROWS and res.kind is Shot.CROSSES_ZERO:
            return prev, res
        prev = res
    raise NoGroundState(
        f"no Grows/CrossesZero transition for c in [{cs[0]:.3g}, {cs[-1]:.3g}]"
    )


def bisect_ground(prob: ProfileProblem, max_iter: int = 200) -> Profile:
    """Ground profile by bisection on the shooting amplitude.

    Bisection runs until the bracket cannot be split in double precision.
    The two bracketing trajectories agree until the separatrix instability
    amplifies the amplitude gap; the profile takes their mean up to a match
    point where psi <= 1e-5 max psi and completes the tail with the decaying
    solution of the linearised equation, integrated inward from r_max.
    """
    setup = _coefficient_setup(prob)
    grid_r = prob.radial_grid().r
    lo, hi = _bracket(prob, setup, grid_r)
    exact = None
    for _ in range(max_iter):
        mid = 0.5 * (lo.c + hi.c)
        if mid <= lo.c or mid >= hi.c:
            break
        res = shoot_classify(prob, mid, 0.0, setup, grid_r)
        if res.kind is Shot.GROWS:
            lo = res
        elif res.kind is Shot.CROSSES_ZERO:
            hi = res
        else:
            exact = res
            break
    if exact is not None:
        lo = hi = exact
    psi, dpsi, k_match = _assemble(prob, setup, grid_r, lo, hi)
    prof = Profile(grid_r.copy(), psi, dpsi, prob.lam, prob.mu_sq, prob.p, prob.manifold,
                   shoot_amplitude=0.5 * (lo.c + hi.c))
    prof.meta.update({"c_lo": lo.c, "c_hi": hi.c, "r_match": float(grid_r[k_match])})
    _certify(prof)
    profile_norms(prof, prob.manifold, update=True)
    prof.residual = el_residual(prof)
    return prof


def _assemble(prob, setup, grid_r, lo, hi):
    nfill = min(lo.n_filled, hi.n_filled)
    if nfill < 8:
        raise NoGroundState("separatrix trajectories too short to build a profile")
    a, b = lo.psi[:nfill], hi.psi[:nfill]
    peak = int(np.argmax(a))
    top = a[peak]
    agree = np.abs(a - b) <= 1e-6 * np.maximum(np.abs(a), 1e-300)
    bad = np.nonzero(~agree[peak:])[0]
    k_div = peak + (bad[0] if bad.size else nfill - peak)
    low = np.nonzero(a[peak:k_div] <= MATCH_LEVEL * top)[0]
    k_match = peak + low[0] if low.size else k_div - 1
    if k_match <= peak:
        raise NoGroundState("bracketing trajectories diverge before the profile decays")
    psi = np.empty(grid_r.size)
    dpsi = np.empty(grid_r.size)
    psi[: k_match + 1] = 0.5 * (a[: k_match + 1] + b[: k_match + 1])
    dpsi[: k_match + 1] = 0.5 * (lo.dpsi[: k_match + 1] + hi.dpsi[: k_match + 1])
    if k_match + 1 < grid_r.size:
        t_psi, t_dpsi = _linear_tail(prob, setup, grid_r[k_match:])
        scale = psi[k_match] / t_psi[0]
        psi[k_match + 1:] = scale * t_psi[1:]
        dpsi[k_match + 1:] = scale * t_dpsi[1:]
    return psi, dpsi, k_match


def _linear_tail(prob, setup, r_nodes):
    """Decaying solution of the linear equation on ``r_nodes`` (ascending),
    normalised to 1 at the outermost node."""
    m = prob.manifold
    r_end = float(r_nodes[-1])
    a_end = geometry.log_area_derivative(m, r_end)
    m_end = float(geometry.mu_sq_profile(m, prob.mu_sq, r_end))
    kappa = math.sqrt(prob.lam + m_end) + 0.5 * a_end
    back = np.ascontiguousarray(r_nodes[::-1][1:])
    kind, tr, ta, tm = setup
    out_psi = np.zeros(back.size)
    out_dpsi = np.zeros(back.size)
    status, nfill, r_ev, _, _ = kernels.shoot(
        kind, float(prob.n - 1), float(prob.mu_sq), float(prob.lam), float(prob.p), 0.0,
        r_end, 1.0, -kappa, back, tr, ta, tm, RTOL, 1e-300, 1e-3, False, 0.0, math.inf,
        out_psi, out_dpsi)
    if status == kernels.UNDERFLOW or nfill != back.size:
        raise StiffnessError("linear tail integration failed", r=r_ev)
    psi = np.concatenate([out_psi[::-1], [1.0]])
    dpsi = np.concatenate([out_dpsi[::-1], [-kappa]])
    return psi, dpsi


def _certify(prof: Profile):
    if not np.all(prof.psi > 0):
        raise NoGroundState("assembled profile is not strictly positive")
    if prof.psi[-1] >= 1e-8 * np.max(prof.psi):
        raise NoGroundState(
            f"profile tail {prof.psi[-1]:.3g} not below 1e-8 max; enlarge r_max"
        )


def _coeff_arrays(m: ManifoldSpec, mu_sq: float, r):
    return geometry.log_area_derivative(m, r), geometry.mu_sq_profile(m, mu_sq, r)


def el_residual_field(prof: Profile):
    """(interior indices, residual) of the reduced equation.

    psi'' is a fourth-order central difference of the psi' samples, so the
    two outermost nodes at each end are skipped. The grid must be uniform.
    """
    r, psi, dpsi = prof.r, prof.psi, prof.dpsi
    h = r[1] - r[0]
    if not np.allclose(np.diff(r), h, rtol=1e-9, atol=1e-12):
        raise ValidationError("residual needs a uniform grid")
    idx = np.arange(2, r.size - 2)
    d2 = (-dpsi[idx + 2] + 8 * dpsi[idx + 1] - 8 * dpsi[idx - 1] + dpsi[idx - 2]) / (12 * h)
    a, m = _coeff_arrays(prof.manifold, prof.mu_sq, r[idx])
    u = psi[idx]
    res = d2 + a * dpsi[idx] - (m + prof.lam) * u + np.abs(u) ** (prof.p - 1) * u
    return idx, res


def el_residual(prof: Profile) -> float:
    """Weighted L^2 norm sqrt(sum R^2 A h) of the reduced-equation residual."""
    idx, res = el_residual_field(prof)
    h = prof.r[1] - prof.r[0]
    w = geometry.area_density(prof.manifold, prof.r[idx]) * h
    return float(np.sqrt(np.sum(w * res ** 2)))


def profile_norms(prof: Profile, m: ManifoldSpec, update: bool = False) -> dict:
    """Trapezoidal norms with weight A(r).

    On the full ray the integrals start at the origin. The angular integrand
    behaves like r^{2s+n-3} there, with s the local log-slope of psi; when
    that power is <= -1 the angular energy diverges and is reported as inf
    with ``angular_divergent`` set.
    """
    r = np.asarray(prof.r, dtype=float)
    psi = np.asarray(prof.psi, dtype=float)
    dpsi = np.asarray(prof.dpsi, dtype=float)
    area = geometry.area_density(m, r)
    mu2 = geometry.mu_sq_profile(m, prof.mu_sq, r)
    integrands = {
        "mass": psi ** 2 * area,
        "lp_norm": np.abs(psi) ** (prof.p + 1) * area,
        "kinetic_radial": dpsi ** 2 * area,
        "kinetic_angular": mu2 * psi ** 2 * area,
    }
    divergent = False
    if m.interval is IntervalKind.FULL and prof.mu_sq > 0 and np.any(psi != 0):
        s_loc = _local_exponent(r, psi)
        divergent = 2 * s_loc + m.n - 2 <= 0.05
    out = {}
    for key, f in integrands.items():
        rr, ff = r, f
        if m.interval is IntervalKind.FULL and r[0] > 0:
            rr = np.concatenate([[0.0], r])
            ff = np.concatenate([[0.0 if key != "kinetic_angular" else _origin_value(r, f)], f])
        out[key] = float(trapezoid(ff, rr))
    if divergent:
        out["kinetic_angular"] = math.inf
    out["kinetic_total"] = out["kinetic_radial"] + out["kinetic_angular"]
    out["angular_divergent"] = bool(divergent)
    if update:
        prof.mass = out["mass"]
        prof.lp_norm = out["lp_norm"]
        prof.kinetic_radial = out["kinetic_radial"]
        prof.kinetic_angular = out["kinetic_angular"]
        prof.angular_divergent = divergent
    return out


def _local_exponent(r, psi) -> float:
    a, b = abs(psi[0]), abs(psi[1])
    if a == 0 or b == 0:
        return math.inf
    return math.log(b / a) / math.log(r[1] / r[0])


def _origin_value(r, f) -> float:
    # integrand ~ C r^q near 0; zero for q > 0, constant for q = 0
    if f[0] == 0 or f[1] == 0:
        return 0.0
    q = math.log(abs(f[1] / f[0])) / math.log(r[1] / r[0])
    return float(f[0]) if abs(q) < 0.05 else 0.0


def rescale_lambda(prof: Profile, lambda_new: float) -> Profile:
    """psi_new(r) = k^{1/(p-1)} psi(sqrt(k) r) with k = lambda_new / lambda.

    Only R^n has this scaling symmetry. The grid is rescaled with the
    profile, so the norms transform exactly.
    """
    m = prof.manifold
    if not (m.area is AreaKind.EUCLIDEAN and m.interval is IntervalKind.FULL):
        raise ConfigurationError("lambda rescaling needs a Euclidean full-ray manifold")
    if not lambda_new > 0 or not prof.lam > 0:
        raise ValidationError("lambda values must be positive")
    k = lambda_new / prof.lam
    amp = k ** (1.0 / (prof.p - 1.0))
    sq = math.sqrt(k)
    out = Profile(prof.r / sq, amp * prof.psi, amp * sq * prof.dpsi, float(lambda_new),
                  prof.mu_sq, prof.p, m, shoot_amplitude=prof.shoot_amplitude,
                  meta=dict(prof.meta))
    profile_norms(out, m, update=True)
    out.residual = el_residual(out)
    return out


def profile_csv_rows(prof: Profile):
    return zip(prof.r.tolist(), prof.psi.tolist(), prof.dpsi.tolist())


def write_profile(prof: Profile, prefix) -> tuple:
    """Write ``<prefix>.csv`` (r,psi,dpsi) and ``<prefix>.json`` metadata."""
    from . import io

    csv_path = io.write_csv(f"{prefix}.csv", ["r", "psi", "dpsi"], profile_csv_rows(prof))
    json_path = io.write_json(f"{prefix}.json", prof.metadata())
    return csv_path, json_path
