"""Rotationally symmetric manifolds described by their radial data.

A manifold ``M = I x S^{n-1}`` (or a warped product over an interval) enters
every computation only through the area density ``A(r)``, its logarithmic
derivative, the warp ``sigma(r)`` and the spectral bottom ``delta`` of
``-Delta``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, DomainError


class IntervalKind(str, Enum):
    FULL = "full"          # I = [0, inf), origin identified to a point
    EXTERIOR = "exterior"  # I = [1, inf), Dirichlet at r = 1
    TUBE = "tube"          # I = (-inf, inf)


class AreaKind(str, Enum):
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"
    CUSTOM = "custom"


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True, eq=False)
class RadialTable:
    """Positive function sampled on a strictly increasing grid.

    Interpolation is linear in ``log f``. Outside the sampled range the last
    segment's log-slope is continued, except towards a positive first node on
    the left, where a power law through the first two nodes is used (this is
    the behaviour of ``r^{n-1}`` or ``sinh r`` near an origin).

    With ``log_r`` set (full-ray manifolds, positive nodes) interpolation is
    linear in ``log f`` against ``log r`` below ``log_r_until``, so power laws
    at the origin are reproduced exactly.
    """

    r: np.ndarray
    values: np.ndarray
    log_r: bool = False

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise ConfigurationError("table needs >= 2 matching (r, value) nodes")
        if np.any(np.diff(r) <= 0):
            raise ConfigurationError("table radii must be strictly increasing")
        if np.any(v <= 0) or not np.all(np.isfinite(v)):
            raise ConfigurationError("table values must be positive and finite")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_logv", np.log(v))
        if self.log_r and r[0] <= 0:
            raise ConfigurationError("log-r interpolation needs positive radii")

    def with_log_r(self) -> "RadialTable":
        return RadialTable(self.r, self.values, log_r=True)

    @classmethod
    def from_pairs(cls, pairs) -> "RadialTable":
        arr = np.asarray(pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ConfigurationError("table must be a list of [r, value] pairs")
        return cls(arr[:, 0], arr[:, 1])

    @classmethod
    def sample(cls, func, r) -> "RadialTable":
        r = np.asarray(r, dtype=float)
        return cls(r, func(r))

    def __call__(self, r):
        r_arr = np.asarray(r, dtype=float)
        rs, lv = self.r, self._logv
        if self.log_r:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.interp(np.log(r_arr), np.log(rs), lv)
        else:
            out = np.interp(r_arr, rs, lv)
        hi = r_arr > rs[-1]
        if np.any(hi):
            slope = (lv[-1] - lv[-2]) / (rs[-1] - rs[-2])
            out = np.where(hi, lv[-1] + slope * (r_arr - rs[-1]), out)
        lo = r_arr < rs[0]
        if np.any(lo):
            if rs[0] > 0:
                slope = (lv[1] - lv[0]) / (math.log(rs[1]) - math.log(rs[0]))
                with np.errstate(divide="ignore", invalid="ignore"):
                    ext = lv[0] + slope * (np.log(np.abs(r_arr)) - math.log(rs[0]))
            else:
                slope = (lv[1] - lv[0]) / (rs[1] - rs[0])
                ext = lv[0] + slope * (r_arr - rs[0])
            out = np.where(lo, ext, out)
        res = np.exp(out)
        return float(res) if np.ndim(r) == 0 else res

    def to_pairs(self) -> list:
        return [[float(a), float(b)] for a, b in zip(self.r, self.values)]


@dataclass(frozen=True, eq=False)
class ManifoldSpec:
    interval: IntervalKind
    n: int
    area: AreaKind
    table: RadialTable | None = None
    sigma: RadialTable | None = None
    delta: float = 0.0
    mu_table: RadialTable | None = None
    name: str = field(default="")

    def __post_init__(self):
        object.__setattr__(self, "interval", IntervalKind(self.interval))
        object.__setattr__(self, "area", AreaKind(self.area))
        if int(self.n) != self.n or self.n < 2:
            raise ConfigurationError(f"dimension n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if self.delta < 0:
            raise ConfigurationError("spectral bottom delta must be nonnegative")
        if self.area is AreaKind.CUSTOM and self.table is None and self.sigma is None:
            raise ConfigurationError("custom area needs a table or a sigma warp")
        if self.interval is IntervalKind.FULL:
            for key in ("table", "sigma", "mu_table"):
                tab = getattr(self, key)
                if tab is not None and not tab.log_r and tab.r[0] > 0:
                    object.__setattr__(self, key, tab.with_log_r())
        if self.interval is IntervalKind.TUBE and self.area is not AreaKind.CUSTOM:
            raise ConfigurationError("tube manifolds need custom area data")
        if self.sigma is not None and self.area is not AreaKind.CUSTOM or (
            self.sigma is not None and self.table is not None
        ):
            # A(r) = A_n sigma(r)^{n-1} must hold at the warp nodes
            rs = self.sigma.r
            rs = rs[_in_interval_mask(self.interval, rs)]
            if rs.size:
                a_direct = _area_raw(self, rs, use_sigma=False)
                a_warp = sphere_area(self.n) * self.sigma(rs) ** (self.n - 1)
                if not np.allclose(a_direct, a_warp, rtol=1e-6, atol=0.0):
                    raise ConfigurationError("sigma warp inconsistent with area density")

    @property
    def has_warp(self) -> bool:
        return self.sigma is not None or self.area is not AreaKind.CUSTOM

    def to_json(self) -> dict:
        doc = {
            "interval": self.interval.value,
            "n": self.n,
            "area": self.area.value,
            "delta": self.delta,
        }
        if self.table is not None:
            doc["table"] = self.table.to_pairs()
        if self.sigma is not None:
            doc["sigma"] = self.sigma.to_pairs()
        if self.mu_table is not None:
            doc["mu_table"] = self.mu_table.to_pairs()
        if self.name:
            doc["name"] = self.name
        return doc


_INTERVAL_ALIASES = {"full": "full", "exterior": "exterior", "tube": "tube"}


def load_manifold(doc) -> ManifoldSpec:
    """Build a ManifoldSpec from a JSON document (str or already-parsed dict)."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"malformed manifold JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigurationError("manifold JSON must be an object")
    try:
        interval = _INTERVAL_ALIASES[doc.get("interval", "full")]
        area = AreaKind(doc.get("area", "euclidean"))
        n = doc["n"]
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"bad manifold field: {exc}") from None
    tables = {}
    for key in ("table", "sigma", "mu_table"):
        if doc.get(key) is not None:
            tables[key] = RadialTable.from_pairs(doc[key])
    return ManifoldSpec(
        interval=interval,
        n=n,
        area=area,
        delta=float(doc.get("delta", 0.0)),
        name=str(doc.get("name", "")),
        **tables,
    )


def euclidean(n: int) -> ManifoldSpec:
    return ManifoldSpec(IntervalKind.FULL, n, AreaKind.EUCLIDEAN, name=f"r{n}")


def hyperbolic(n: int, delta: float | None = None) -> ManifoldSpec:
    # bottom of Spec(-Delta) on H^n is (n-1)^2/4 unless the caller says otherwise
    if delta is None:
        delta = (n - 1) ** 2 / 4.0
    return ManifoldSpec(IntervalKind.FULL, n, AreaKind.HYPERBOLIC, delta=delta, name=f"h{n}")


def exterior_ball(n: int, delta: float = 0.0) -> ManifoldSpec:
    return ManifoldSpec(
        IntervalKind.EXTERIOR, n, AreaKind.EUCLIDEAN, delta=delta, name=f"extball{n}"
    )


PRESETS = {
    "r2": lambda: euclidean(2),
    "r3": lambda: euclidean(3),
    "r4": lambda: euclidean(4),
    "h2": lambda: hyperbolic(2),
    "extball2": lambda: exterior_ball(2),
}


def preset(name: str) -> ManifoldSpec:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None


def _in_interval_mask(kind: IntervalKind, r: np.ndarray) -> np.ndarray:
    if kind is IntervalKind.FULL:
        return r > 0
    if kind is IntervalKind.EXTERIOR:
        return r >= 1
    return np.isfinite(r)


def _check_domain(m: ManifoldSpec, r) -> np.ndarray:
    r_arr = np.asarray(r, dtype=float)
    if not np.all(_in_interval_mask(m.interval, r_arr)):
        bad = r_arr[~_in_interval_mask(m.interval, r_arr)]
        raise DomainError(
            f"r={bad.flat[0]!r} outside interval {m.interval.value} of the manifold"
        )
    return r_arr


def _area_raw(m: ManifoldSpec, r: np.ndarray, use_sigma: bool = True) -> np.ndarray:
    an = sphere_area(m.n)
    if m.area is AreaKind.EUCLIDEAN:
        return an * np.abs(r) ** (m.n - 1)
    if m.area is AreaKind.HYPERBOLIC:
        return an * np.sinh(r) ** (m.n - 1)
    if m.table is not None:
        return m.table(r)
    if use_sigma and m.sigma is not None:
        return an * m.sigma(r) ** (m.n - 1)
    raise ConfigurationError("custom area has no data")


def _log_area_raw(m: ManifoldSpec, r: np.ndarray) -> np.ndarray:
    """log A(r), finite where A itself would overflow."""
    r = np.asarray(r, dtype=float)
    if m.area is AreaKind.HYPERBOLIC:
        a = np.abs(r)
        log_sinh = a + np.log1p(-np.exp(-2.0 * a)) - math.log(2.0)
        return math.log(sphere_area(m.n)) + (m.n - 1) * log_sinh
    if m.area is AreaKind.EUCLIDEAN:
        return math.log(sphere_area(m.n)) + (m.n - 1) * np.log(np.abs(r))
    return np.log(_area_raw(m, r))


def area_density(m: ManifoldSpec, r):
    """A(r), the density of dVol = A(r) dr dS(omega) normalised so the
    sphere factor A_n is included."""
    r_arr = _check_domain(m, r)
    out = _area_raw(m, r_arr)
    return float(out) if np.ndim(r) == 0 else out


def log_area_derivative(m: ManifoldSpec, r):
    """A'(r)/A(r): analytic for the model spaces, centred differences of
    log A for tabulated data."""
    r_arr = _check_domain(m, r)
    if m.area is AreaKind.EUCLIDEAN:
        out = (m.n - 1) / r_arr
    elif m.area is AreaKind.HYPERBOLIC:
        out = (m.n - 1) / np.tanh(r_arr)
    else:
        step = 1e-5 * np.maximum(1.0, np.abs(r_arr))
        lo = r_arr - step
        if m.interval is IntervalKind.FULL:
            lo = np.maximum(lo, 0.5 * r_arr)
        elif m.interval is IntervalKind.EXTERIOR:
            lo = np.maximum(lo, 1.0)
        hi = r_arr + step
        out = (np.log(_area_raw(m, hi)) - np.log(_area_raw(m, lo))) / (hi - lo)
    return float(out) if np.ndim(r) == 0 else out


def warp(m: ManifoldSpec, r):
    """sigma(r) when the metric is a warped product, else None."""
    r_arr = _check_domain(m, r)
    if m.sigma is not None:
        out = m.sigma(r_arr)
    elif m.area is AreaKind.EUCLIDEAN:
        out = np.abs(r_arr)
    elif m.area is AreaKind.HYPERBOLIC:
        out = np.sinh(r_arr)
    else:
        return None
    return float(out) if np.ndim(r) == 0 else out


def mu_profile(m: ManifoldSpec, rep, r):
    """mu_pi(r): the radial angular-frequency profile of a symmetry class.

    ``rep`` only needs a ``mu_sq`` attribute.
    """
    return _mu(m, rep.mu_sq, r)


def mu_sq_profile(m: ManifoldSpec, mu_sq: float, r):
    """mu_pi(r)^2 for a class with eigenvalue ``mu_sq``. The trivial class
    needs no warp."""
    if mu_sq == 0.0 and m.mu_table is None:
        _check_domain(m, r)
        return np.zeros_like(np.asarray(r, dtype=float))
    return np.asarray(_mu(m, mu_sq, r)) ** 2


def _mu(m: ManifoldSpec, mu_sq: float, r):
    r_arr = _check_domain(m, r)
    if m.mu_table is not None:
        out = m.mu_table(r_arr)
    else:
        sig = warp(m, r_arr)
        if sig is None:
            raise ConfigurationError(
                "mu_pi(r) needs a sigma warp, a Euclidean/hyperbolic area, or a mu table"
            )
        out = math.sqrt(mu_sq) / sig
    return float(out) if np.ndim(r) == 0 else out


@dataclass(frozen=True)
class DecayReport:
    integral_condition: bool
    growth_condition: bool
    window_sums: tuple
    tail_ratio: float
    tail_estimate: float
    sup_log_derivative: float


def decay_hypothesis_check(m: ManifoldSpec, r_max: float, ratio_cut: float = 0.75) -> DecayReport:
    """Decide numerically whether int_{|r|>=1} dr/A(r) < inf and whether
    A -> inf with A'/A bounded.

    Window sums over dyadic shells [2^k, 2^{k+1}] decay geometrically for a
    convergent tail; a harmonic-type tail gives ratios near one.
    """
    if r_max < 10:
        raise DomainError("r_max must be >= 10 for the tail extrapolation")
    sides = [1.0, -1.0] if m.interval is IntervalKind.TUBE else [1.0]
    integral_ok = True
    growth_ok = True
    sums_all = []
    worst_ratio = 0.0
    tail_total = 0.0
    sup_ld = 0.0
    for sgn in sides:
        edges = [1.0]
        while edges[-1] * 2 <= r_max:
            edges.append(edges[-1] * 2)
        sums = []
        for a, b in zip(edges[:-1], edges[1:]):
            val, _ = integrate.quad(
                lambda s: math.exp(-float(_log_area_raw(m, sgn * s))), a, b, limit=200
            )
            sums.append(val)
        sums_all.append(tuple(sums))
        ratio = sums[-1] / sums[-2] if sums[-2] > 0 else 0.0
        worst_ratio = max(worst_ratio, ratio)
        if ratio < ratio_cut:
            tail_total += sums[-1] * ratio / (1.0 - ratio)
        else:
            integral_ok = False
            tail_total = math.inf

        rr = sgn * np.linspace(1.0, r_max, 2001)
        ld = np.abs(np.asarray(log_area_derivative(m, rr)) * sgn)
        half = rr.size // 2
        s_in, s_out = float(np.max(ld[: half + 1])), float(np.max(ld[half:]))
        sup_ld = max(sup_ld, s_in, s_out)
        bounded = np.isfinite(s_out) and s_out <= 1.25 * s_in + 1e-12
        log_tail = _log_area_raw(m, rr[half:])
        increasing = bool(np.all(np.diff(log_tail) > 0))
        grows = log_tail[-1] >= log_tail[0] + math.log(1.1)
        growth_ok = growth_ok and bounded and increasing and grows
    return DecayReport(
        integral_condition=integral_ok,
        growth_condition=growth_ok,
        window_sums=tuple(sums_all),
        tail_ratio=worst_ratio,
        tail_estimate=tail_total,
        sup_log_derivative=sup_ld,
    )
