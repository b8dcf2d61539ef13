"""Pure-Python implementations of the hot kernels.

These mirror ``_kernels.pyx`` operation for operation; the compiled module
is preferred at import time when it is available (see ``kernels.py``).
"""
import math

import numpy as np
from scipy.linalg import solve_banded

END, CROSS, GROW, DECAY, UNDERFLOW = 0, 1, 2, 3, 4

# Dormand-Prince 5(4)
_C2, _C3, _C4, _C5 = 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9
_A21 = 1.0 / 5
_A31, _A32 = 3.0 / 40, 9.0 / 40
_A41, _A42, _A43 = 44.0 / 45, -56.0 / 15, 32.0 / 9
_A51, _A52, _A53, _A54 = 19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525, -1.0 / 40)


def _coeffs(kind, dim_m1, mu_sq, r, tab_r, tab_a, tab_m):
    """(A'/A, mu(r)^2) at r."""
    if kind == 0:
        return dim_m1 / r, mu_sq / (r * r)
    if kind == 1:
        sh = math.sinh(r)
        return dim_m1 * math.cosh(r) / sh, mu_sq / (sh * sh)
    # tabulated r*A'/A and r^2*mu^2, linear in r
    n = tab_r.shape[0]
    if r <= tab_r[0]:
        ra, rm = tab_a[0], tab_m[0]
    elif r >= tab_r[n - 1]:
        ra, rm = tab_a[n - 1], tab_m[n - 1]
    else:
        lo, hi = 0, n - 1
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if tab_r[mid] <= r:
                lo = mid
            else:
                hi = mid
        w = (r - tab_r[lo]) / (tab_r[hi] - tab_r[lo])
        ra = tab_a[lo] + w * (tab_a[hi] - tab_a[lo])
        rm = tab_m[lo] + w * (tab_m[hi] - tab_m[lo])
    return ra / r, rm / (r * r)


def _rhs(r, y0, y1, kind, dim_m1, mu_sq, lam, p, g, tab_r, tab_a, tab_m):
    a, m = _coeffs(kind, dim_m1, mu_sq, r, tab_r, tab_a, tab_m)
    nl = g * math.pow(abs(y0), p - 1.0) * y0 if g != 0.0 else 0.0
    return y1, -a * y1 + (m + lam) * y0 - nl


def shoot(kind, dim_m1, mu_sq, lam, p, g, r0, psi0, dpsi0, grid, tab_r, tab_a, tab_m,
          rtol, atol, h_init, events, tail_tol, grow_cap, out_psi, out_dpsi):
    """Integrate psi'' + a psi' - (m + lam) psi + g |psi|^{p-1} psi = 0.

    Values are written at every node of ``grid`` (monotone, all beyond r0 in
    the direction of integration). Returns
    ``(status, n_filled, r_event, psi_max, n_steps)``.
    """
    ngrid = grid.shape[0]
    direction = 1.0 if grid[0] > r0 else -1.0
    r = r0
    y0, y1 = psi0, dpsi0
    args = (kind, dim_m1, mu_sq, lam, p, g, tab_r, tab_a, tab_m)
    f0, f1 = _rhs(r, y0, y1, *args)
    h = abs(h_init)
    k = 0
    psi_max = abs(y0)
    descended = False
    nsteps = 0
    while k < ngrid:
        target = grid[k]
        span = abs(target - r)
        h_prop = h
        hit = False
        if h >= span:
            h = span
            hit = True
        if h < 1e-14 * max(1.0, abs(r)):
            return UNDERFLOW, k, r, psi_max, nsteps
        hs = direction * h
        k1a, k1b = f0, f1
        k2a, k2b = _rhs(r + _C2 * hs, y0 + hs * _A21 * k1a, y1 + hs * _A21 * k1b, *args)
        k3a, k3b = _rhs(r + _C3 * hs,
                        y0 + hs * (_A31 * k1a + _A32 * k2a),
                        y1 + hs * (_A31 * k1b + _A32 * k2b), *args)
        k4a, k4b = _rhs(r + _C4 * hs,
                        y0 + hs * (_A41 * k1a + _A42 * k2a + _A43 * k3a),
                        y1 + hs * (_A41 * k1b + _A42 * k2b + _A43 * k3b), *args)
        k5a, k5b = _rhs(r + _C5 * hs,
                        y0 + hs * (_A51 * k1a + _A52 * k2a + _A53 * k3a + _A54 * k4a),
                        y1 + hs * (_A51 * k1b + _A52 * k2b + _A53 * k3b + _A54 * k4b), *args)
        k6a, k6b = _rhs(r + hs,
                        y0 + hs * (_A61 * k1a + _A62 * k2a + _A63 * k3a + _A64 * k4a + _A65 * k5a),
                        y1 + hs * (_A61 * k1b + _A62 * k2b + _A63 * k3b + _A64 * k4b + _A65 * k5b),
                        *args)
        n0 = y0 + hs * (_B1 * k1a + _B3 * k3a + _B4 * k4a + _B5 * k5a + _B6 * k6a)
        n1 = y1 + hs * (_B1 * k1b + _B3 * k3b + _B4 * k4b + _B5 * k5b + _B6 * k6b)
        r_new = target if hit else r + hs
        k7a, k7b = _rhs(r_new, n0, n1, *args)
        e0 = hs * (_E1 * k1a + _E3 * k3a + _E4 * k4a + _E5 * k5a + _E6 * k6a + _E7 * k7a)
        e1 = hs * (_E1 * k1b + _E3 * k3b + _E4 * k4b + _E5 * k5b + _E6 * k6b + _E7 * k7b)
        s0 = atol + rtol * max(abs(y0), abs(n0))
        s1 = atol + rtol * max(abs(y1), abs(n1))
        err = max(abs(e0) / s0, abs(e1) / s1)
        if not (err <= 1.0):
            if err != err:
                fac = 0.2
            else:
                fac = max(0.2, 0.9 * math.pow(err, -0.2))
            h = h * fac
            continue
        nsteps += 1
        fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * math.pow(err, -0.2)))
        h_next = h * fac
        if events:
            if n0 < 0.0:
                r_event = r + hs * y0 / (y0 - n0)
                return CROSS, k, r_event, psi_max, nsteps
            if n0 > psi_max:
                psi_max = n0
            if direction * n1 < 0.0:
                descended = True
            elif descended and direction * n1 > 0.0:
                return GROW, k, r_new, psi_max, nsteps
            if n0 > grow_cap and direction * n1 > 0.0:
                return GROW, k, r_new, psi_max, nsteps
            if descended and n0 <= tail_tol * psi_max:
                a, m = _coeffs(kind, dim_m1, mu_sq, r_new, tab_r, tab_a, tab_m)
                kappa = math.sqrt(lam + m) + 0.5 * a
                if n0 > 0.0 and abs(-direction * n1 / n0 - kappa) <= 0.25 * kappa:
                    if hit:
                        out_psi[k] = n0
                        out_dpsi[k] = n1
                        k += 1
                    return DECAY, k, r_new, psi_max, nsteps
        r, y0, y1 = r_new, n0, n1
        f0, f1 = k7a, k7b
        if hit:
            out_psi[k] = y0
            out_dpsi[k] = y1
            k += 1
            h = max(h_next, h_prop) if fac >= 1.0 else h_next
        else:
            h = h_next
    return END, k, r, psi_max, nsteps


def solve_tridiagonal(sub, diag, sup, rhs):
    """Solve a tridiagonal system; ``sub[0]`` and ``sup[-1]`` are ignored."""
    n = diag.shape[0]
    ab = np.zeros((3, n), dtype=np.result_type(sub, diag, sup, rhs))
    ab[0, 1:] = sup[:-1]
    ab[1] = diag
    ab[2, :-1] = sub[1:]
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def midpoint_step(sub, diag, sup, v, dt, p, g, tol, maxit):
    """One implicit-midpoint step of i v_t = L v - g |v|^{p-1} v.

    Solves (2 + i dt L) m = 2 v + i dt g |m|^{p-1} m by fixed-point
    iteration on the nonlinear term and returns ``(2 m - v, iterations,
    converged)``.
    """
    n = diag.shape[0]
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = 1j * dt * sup[:-1]
    ab[1] = 2.0 + 1j * dt * diag
    ab[2, :-1] = 1j * dt * sub[1:]
    m = v.copy()
    converged = False
    it = 0
    while it < maxit:
        it += 1
        if g != 0.0:
            rhs = 2.0 * v + (1j * dt * g) * (np.abs(m) ** (p - 1.0)) * m
        else:
            rhs = 2.0 * v
        m_new = solve_banded((1, 1), ab, rhs, check_finite=False)
        change = np.max(np.abs(m_new - m)) if n else 0.0
        scale = np.max(np.abs(m_new)) if n else 0.0
        m = m_new
        if g == 0.0 or change <= tol * max(scale, 1e-300):
            converged = True
            break
    return 2.0 * m - v, it, converged
