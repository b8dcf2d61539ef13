"""Radially reduced focusing NLS ``i v_t + Delta v + g |v|^{p-1} v = 0``.

Space: the weighted finite-volume grid of ``grid.RadialGrid`` (``L = W^{-1} S``
is the discrete ``-Delta`` including the angular potential). Time: implicit
midpoint with fixed-point iteration on the nonlinearity. Mass
``sum W |v|^2`` is conserved up to the fixed-point tolerance because ``L``
is self-adjoint in the ``W`` inner product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import kernels
from .errors import ConvergenceError, ValidationError
from .geometry import IntervalKind
from .grid import RadialGrid

FP_TOL = 1e-12
FP_MAXIT = 30
MAX_HALVINGS = 10
CONTRACTION = 0.25  # dt * max|v|^{p-1} kept below this (fixed point needs < 0.5)


@dataclass(frozen=True, eq=False)
class EvolutionState:
    grid: RadialGrid
    v: np.ndarray
    t: float = 0.0
    p: float | None = None
    g: float = 1.0

    def __post_init__(self):
        v = np.ascontiguousarray(self.v, dtype=complex)
        if v.shape != self.grid.r.shape:
            raise ValidationError("field does not match the grid")
        object.__setattr__(self, "v", v)
        if self.p is None:
            object.__setattr__(self, "p", 1.0 + 4.0 / self.grid.n)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def mu_sq(self) -> float:
        return self.grid.mu_sq

    def with_field(self, v, t) -> "EvolutionState":
        return replace(self, v=v, t=t)

    @property
    def ledger(self) -> dict:
        return conserved_diagnostics(self)


def make_grid(n: int, mu_sq: float, h: float, r_max: float, manifold=None) -> RadialGrid:
    from .geometry import euclidean

    return RadialGrid.build(manifold or euclidean(n), mu_sq, h, r_max)


def state_from_profile(grid: RadialGrid, prof, scale: float = 1.0, g: float = 1.0,
                       p: float | None = None) -> EvolutionState:
    """scale * prof on ``grid``; exact when the nodes coincide, else linear
    interpolation (zero beyond the profile's range)."""
    if prof.r.shape == grid.r.shape and np.allclose(prof.r, grid.r, rtol=0, atol=1e-12):
        vals = np.asarray(prof.psi, dtype=float)
    else:
        vals = np.interp(grid.r, prof.r, prof.psi, right=0.0)
    return EvolutionState(grid, scale * vals.astype(complex), 0.0, p, g)


def _bands(grid: RadialGrid):
    cache = grid.__dict__.setdefault("_op_bands", None)
    if cache is None:
        cache = tuple(np.ascontiguousarray(b) for b in grid.operator_bands())
        object.__setattr__(grid, "_op_bands", cache)
    return cache


def _raw_step(state: EvolutionState, dt: float, tol: float, maxit: int):
    sub, diag, sup = _bands(state.grid)
    return kernels.midpoint_step(sub, diag, sup, state.v, float(dt), float(state.p),
                                 float(state.g), tol, maxit)


def evolve_step(state: EvolutionState, dt: float, tol: float = FP_TOL,
                maxit: int = FP_MAXIT, max_halvings: int = MAX_HALVINGS) -> EvolutionState:
    """Advance by ``dt`` (negative allowed). If the fixed point fails, the
    interval is covered by two half steps, recursively up to
    ``max_halvings`` levels."""
    if dt == 0:
        return state

    def advance(s, h, level):
        v_new, _, ok = _raw_step(s, h, tol, maxit)
        if ok:
            return s.with_field(v_new, s.t + h)
        if level >= max_halvings:
            raise ConvergenceError(
                f"fixed point failed at t={s.t:.6g} after {max_halvings} halvings of dt"
            )
        mid = advance(s, 0.5 * h, level + 1)
        return advance(mid, 0.5 * h, level + 1)

    return advance(state, dt, 0)


def stable_dt(state: EvolutionState, dt_max: float) -> float:
    """Largest dt <= dt_max with dt * g max|v|^{p-1} <= CONTRACTION."""
    if state.g == 0:
        return dt_max
    peak = float(np.max(np.abs(state.v))) ** (state.p - 1.0) * abs(state.g)
    return dt_max if peak == 0 else min(dt_max, CONTRACTION / peak)


# diagnostics

def _face_terms(grid: RadialGrid, v):
    rf = grid.r[:-1] + 0.5 * grid.h
    af = grid.face_area[1:-1]
    return rf, af, np.conj(v[:-1]) * v[1:]


def conserved_diagnostics(state: EvolutionState) -> dict:
    grid, v, p = state.grid, state.v, state.p
    w = grid.weights
    av2 = np.abs(v) ** 2
    mass = float(np.sum(w * av2))
    grad_sq = float(np.real(np.vdot(v, grid.apply_stiffness(v))))
    lp = float(np.sum(w * av2 ** ((p + 1) / 2.0)))
    energy = 0.5 * grad_sq - state.g * lp / (p + 1)
    rr = grid.r ** 2 if grid.manifold.interval is IntervalKind.FULL else (grid.r - 0.0) ** 2
    f = float(np.sum(w * rr * av2))
    rf, af, cross = _face_terms(grid, v)
    fprime = 4.0 * float(np.sum(af * rf * np.imag(cross)))
    l4 = float(np.sum(w * av2 ** 2)) ** 0.25
    return {
        "t": state.t,
        "mass": mass,
        "energy": energy,
        "grad_sq": grad_sq,
        "lp": lp,
        "f": f,
        "fprime": fprime,
        "weighted_mass": f,
        "L4": l4,
        "Linf": float(np.sqrt(np.max(av2))),
    }


def lr_norm(state: EvolutionState, r_exp: float) -> float:
    av = np.abs(state.v)
    if math.isinf(r_exp):
        return float(np.max(av))
    return float(np.sum(state.grid.weights * av ** r_exp)) ** (1.0 / r_exp)


# trajectories

@dataclass
class Trace:
    states: list
    rows: list
    stopped: str = "T"
    meta: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def column(self, key) -> np.ndarray:
        return np.array([row[key] for row in self.rows])

    @property
    def final(self) -> EvolutionState:
        return self.states[-1]


def run(state: EvolutionState, T: float, dt: float, sample_dt: float | None = None,
        adaptive: bool = True, stop=None, keep_states: bool = True) -> Trace:
    """Evolve to time T, sampling at multiples of ``sample_dt``.

    Steps shrink to honour the contraction cap and to land on sample
    times. ``stop(state, row)`` may return a reason string to end early.
    """
    if dt <= 0 or T < state.t:
        raise ValidationError("need dt > 0 and T >= t0")
    sample_dt = sample_dt or dt
    states, rows = [state], [conserved_diagnostics(state)]
    k = 1
    s = state
    reason = "T"
    n_steps = 0
    while s.t < T - 1e-12 * max(1.0, T):
        target = min(state.t + k * sample_dt, T)
        while s.t < target - 1e-12 * max(1.0, target):
            h = stable_dt(s, dt) if adaptive else dt
            h = min(h, target - s.t)
            s = evolve_step(s, h)
            n_steps += 1
        s = s.with_field(s.v, target)
        row = conserved_diagnostics(s)
        rows.append(row)
        states.append(s if keep_states else None)
        k += 1
        if stop is not None:
            why = stop(s, row)
            if why:
                reason = why
                break
    if not keep_states:
        states[-1] = s
    return Trace(states, rows, reason, {"steps": n_steps})


# virial and pseudoconformal identities

@dataclass
class VirialReport:
    times: np.ndarray
    f: np.ndarray
    fpp_second_diff: np.ndarray
    fpp_from_fprime: np.ndarray
    expected: float
    rel_error: float
    fprime_rel_error: float


def _uniform(times):
    d = np.diff(times)
    if d.size == 0 or not np.allclose(d, d[0], rtol=1e-9, atol=1e-12):
        raise ValidationError("trace must be sampled at uniform time steps")
    return float(d[0])


def virial_series(trace: Trace, linear: bool = False) -> VirialReport:
    """f(t) = sum W r^2 |v|^2 with f'' against 16 E(v0) (8 ||grad v0||^2 for
    the free flow). f' from its face formula is checked against centred
    differences of f."""
    t = np.array([row["t"] for row in trace.rows])
    dt = _uniform(t)
    f = trace.column("f")
    fp = trace.column("fprime")
    e0 = trace.rows[0]["energy"] if not linear else 0.5 * trace.rows[0]["grad_sq"]
    expected = 16.0 * e0
    fpp = (f[2:] - 2 * f[1:-1] + f[:-2]) / dt ** 2
    fpp2 = (fp[2:] - fp[:-2]) / (2 * dt)
    rel = float(np.max(np.abs(fpp - expected)) / abs(expected))
    fd = (f[2:] - f[:-2]) / (2 * dt)
    scale = max(np.max(np.abs(fp)), abs(expected) * dt * t.size)
    fprime_err = float(np.max(np.abs(fd - fp[1:-1])) / scale)
    return VirialReport(t, f, fpp, fpp2, expected, rel, fprime_err)


def pseudoconformal_values(trace: Trace) -> np.ndarray:
    """||(x + 2it grad) v||^2 - 8 t^2/(p+1) int |v|^{p+1} along the trace.

    Expanding the square, ||(x + 2it grad) v||^2 = f - t f' + 4 t^2 ||grad v||^2,
    with the same discrete f, f' and kinetic form as the ledger.
    """
    out = []
    p = trace.states[0].p if trace.states[0] is not None else trace.final.p
    g = trace.final.g
    for row in trace.rows:
        t = row["t"]
        val = row["f"] - t * row["fprime"] + 4 * t * t * row["grad_sq"]
        val -= 8 * t * t * g * row["lp"] / (p + 1)
        out.append(val)
    return np.array(out)


def pseudoconformal_residual(trace: Trace) -> dict:
    vals = pseudoconformal_values(trace)
    ref = trace.rows[0]["f"]
    drift = np.abs(vals - ref) / abs(ref)
    return {"values": vals, "reference": ref, "max_rel_drift": float(np.max(drift))}


def pseudoconformal_transform(state: EvolutionState) -> EvolutionState:
    """v at time s != 0 -> |t|^{-n/2} e^{i r^2/(4t)} v(r/t) at time t = -1/s.

    Radial data make v(x/t) = v(|x|/|t|). Values are interpolated linearly
    in r and vanish beyond the grid.
    """
    s = state.t
    if s == 0:
        raise ValidationError("pseudoconformal transform needs t != 0")
    t = -1.0 / s
    r = state.grid.r
    src = r / abs(t)
    re = np.interp(src, r, state.v.real, right=0.0)
    im = np.interp(src, r, state.v.imag, right=0.0)
    v_new = abs(t) ** (-state.n / 2.0) * np.exp(1j * r ** 2 / (4 * t)) * (re + 1j * im)
    return state.with_field(v_new, t)


# experiments

class Verdict(str, Enum):
    GLOBAL_BOUNDED = "GlobalBounded"
    BLOW_UP = "BlowUp"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class ThresholdResult:
    verdict: Verdict
    t_star: float | None
    energy: float
    sigma: float
    bound: float | None
    sup_grad_sq: float
    initial_grad_sq: float
    virial_root: float | None
    t_star_refined: float | None = None
    trace: Trace | None = None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "t_star": self.t_star,
            "t_star_refined": self.t_star_refined,
            "energy": self.energy,
            "sigma": self.sigma,
            "gradient_bound": self.bound,
            "sup_grad_sq": self.sup_grad_sq,
            "initial_grad_sq": self.initial_grad_sq,
            "virial_root": self.virial_root,
        }


def virial_root(f0: float, fp0: float, energy: float) -> float | None:
    """Positive root of f0 + fp0 t + 8 E t^2 (None unless E < 0)."""
    if energy >= 0:
        return None
    a, b, c = 8.0 * energy, fp0, f0
    disc = b * b - 4 * a * c
    roots = [(-b + sgn * math.sqrt(disc)) / (2 * a) for sgn in (1, -1)]
    pos = [x for x in roots if x > 0]
    return min(pos) if pos else None


def _blowup_run(v0: EvolutionState, T, dt, growth, sample_dt):
    g0 = conserved_diagnostics(v0)["grad_sq"]

    def stop(s, row):
        if row["grad_sq"] >= growth ** 2 * g0:
            return "blowup"
        return None

    return run(v0, T, dt, sample_dt=sample_dt, stop=stop, keep_states=False)


def classify_run(v0: EvolutionState, W: float, T: float, dt: float = 1e-3,
                         growth: float = 50.0, sample_dt: float | None = None,
                         margin: float = 0.05, refine: bool = True) -> ThresholdResult:
    """Evolve v0 to T and classify.

    GlobalBounded: sup ||grad v||^2 <= E/(1/2 - sigma) (1 + margin) with
    sigma = W ||v0||^{p-1}/(p+1) < 1/2. BlowUp: ||grad v|| grows by
    ``growth``; with ``refine`` the run is repeated at dt/2 and t* must agree
    to 5%.
    """
    d0 = conserved_diagnostics(v0)
    p = v0.p
    energy = d0["energy"]
    sigma = W * d0["mass"] ** ((p - 1) / 2.0) / (p + 1)
    bound = energy / (0.5 - sigma) * (1 + margin) if sigma < 0.5 and energy > 0 else None
    root = virial_root(d0["f"], d0["fprime"], energy)
    sample_dt = sample_dt or max(dt, T / 400.0)
    trace = _blowup_run(v0, T, dt, growth, sample_dt)
    sup_grad = float(np.max(trace.column("grad_sq")))
    if trace.stopped == "blowup":
        t_star = trace.rows[-1]["t"]
        t_ref = None
        verdict = Verdict.BLOW_UP
        if refine:
            tr2 = _blowup_run(v0, T, 0.5 * dt, growth, 0.5 * sample_dt)
            t_ref = tr2.rows[-1]["t"] if tr2.stopped == "blowup" else None
            if t_ref is None or abs(t_ref - t_star) > 0.05 * t_star:
                verdict = Verdict.INCONCLUSIVE
        return ThresholdResult(verdict, t_star, energy, sigma, bound, sup_grad,
                               d0["grad_sq"], root, t_ref, trace)
    if bound is not None and sup_grad <= bound:
        verdict = Verdict.GLOBAL_BOUNDED
    else:
        verdict = Verdict.INCONCLUSIVE
    return ThresholdResult(verdict, None, energy, sigma, bound, sup_grad, d0["grad_sq"],
                           root, None, trace)


def threshold_grid(q, r_min_max: float = 30.0) -> RadialGrid:
    """Grid sharing the nodes of the profile q, extended to at least r_min_max."""
    h = float(q.r[1] - q.r[0])
    r_max = max(r_min_max, float(q.r[-1]) + 0.5 * h)
    return make_grid(q.manifold.n, q.mu_sq, h, r_max, q.manifold)


def threshold_experiment(sup, fraction: float, T: float, dt: float = 1e-3,
                         gaussian_focus: bool = False, width: float = 1.0,
                         refine: bool = True, grid: RadialGrid | None = None) -> ThresholdResult:
    """Threshold experiment for the K-normalized maximizer of ``sup``.

    ``sup`` is the result of ``variational.weinstein_sup``. Initial data is
    fraction * Q, or with ``gaussian_focus`` a Gaussian in the same class
    carrying the mass fraction^2 ||Q||^2.
    """
    if fraction <= 0 or T <= 0:
        raise ValidationError("fraction and T must be positive")
    q = sup.minimizer
    grid = grid or threshold_grid(q)
    if gaussian_focus:
        v0 = scale_to_mass(gaussian_state(grid, 1.0, width), fraction ** 2 * q.mass)
    else:
        v0 = state_from_profile(grid, q, fraction)
    return classify_run(v0, sup.value, T, dt=dt, refine=refine)


@dataclass
class DecayReport:
    r_exp: float
    slope: float
    predicted: float
    ok: bool
    times: np.ndarray
    norms: np.ndarray


def decay_check(trace: Trace, r_exp: float, slack: float = 0.1) -> DecayReport:
    """Fit log ||v(t)||_{L^r} against log <t> over the last decade in t."""
    n = trace.final.n
    if r_exp < 2:
        raise ValidationError("r must be >= 2")
    t = trace.times
    t_end = t[-1]
    sel = t >= t_end / 10.0
    if t_end <= 0 or t[0] > t_end / 10.0 or np.count_nonzero(sel) < 3:
        raise ValidationError("trace shorter than one decade in t")
    norms = np.array([lr_norm(s, r_exp) for s in trace.states])
    bracket = np.sqrt(1.0 + t ** 2)
    slope = float(np.polyfit(np.log(bracket[sel]), np.log(norms[sel]), 1)[0])
    pred = -n * (0.5 - (0.0 if math.isinf(r_exp) else 1.0 / r_exp))
    return DecayReport(r_exp, slope, pred, slope <= pred + slack, t, norms)


def free_flow(state: EvolutionState, duration: float, dt: float) -> EvolutionState:
    """Linear propagation (g = 0) by ``duration`` (sign gives direction) with
    the same spatial operator."""
    lin = replace(state, g=0.0)
    steps = max(1, int(round(abs(duration) / dt)))
    h = duration / steps
    for _ in range(steps):
        lin = evolve_step(lin, h)
    return replace(lin, g=state.g)


@dataclass
class ScatteringReport:
    times: list
    increments: list
    decreasing: bool


def scattering_diagnostic(trace: Trace, times, dt: float) -> ScatteringReport:
    """Cauchy increments ||w_{i+1} - w_i|| of w_i = e^{-i t_i Delta} v(t_i),
    the free flow run backwards over t_i."""
    ts = trace.times
    ws = []
    for ti in times:
        k = int(np.argmin(np.abs(ts - ti)))
        if abs(ts[k] - ti) > 1e-9 * max(1.0, ti):
            raise ValidationError(f"time {ti} not sampled in the trace")
        s = trace.states[k]
        ws.append(free_flow(s, -ti, dt).v)
    grid = trace.final.grid
    inc = [grid.wnorm(b - a) for a, b in zip(ws, ws[1:])]
    dec = all(b < a for a, b in zip(inc, inc[1:]))
    return ScatteringReport(list(times), inc, dec)


def gaussian_state(grid: RadialGrid, amplitude: float, width: float = 1.0,
                   g: float = 1.0, p: float | None = None, phase_chirp: float = 0.0) -> EvolutionState:
    """amplitude * r^s exp(-r^2/width^2) exp(i chirp r^2), s the indicial exponent."""
    from .profile_solver import indicial_exponent

    s = indicial_exponent(grid.n, grid.mu_sq)
    r = grid.r
    v = amplitude * r ** s * np.exp(-(r / width) ** 2) * np.exp(1j * phase_chirp * r ** 2)
    return EvolutionState(grid, v, 0.0, p, g)


def scale_to_mass(state: EvolutionState, mass: float) -> EvolutionState:
    cur = state.grid.mass(state.v)
    return state.with_field(state.v * math.sqrt(mass / cur), state.t)
