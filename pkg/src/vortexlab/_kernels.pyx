# cython: language_level=3
"""Compiled versions of the hot kernels in ``_kernels_py``.

Same signatures and status codes; see the pure-Python module for the
reference semantics.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt, sinh, cosh, isnan

cnp.import_array()

cdef enum:
    END = 0
    CROSS = 1
    GROW = 2
    DECAY = 3
    UNDERFLOW = 4

cdef double _C2 = 1.0 / 5, _C3 = 3.0 / 10, _C4 = 4.0 / 5, _C5 = 8.0 / 9
cdef double _A21 = 1.0 / 5
cdef double _A31 = 3.0 / 40, _A32 = 9.0 / 40
cdef double _A41 = 44.0 / 45, _A42 = -56.0 / 15, _A43 = 32.0 / 9
cdef double _A51 = 19372.0 / 6561, _A52 = -25360.0 / 2187, _A53 = 64448.0 / 6561
cdef double _A54 = -212.0 / 729
cdef double _A61 = 9017.0 / 3168, _A62 = -355.0 / 33, _A63 = 46732.0 / 5247
cdef double _A64 = 49.0 / 176, _A65 = -5103.0 / 18656
cdef double _B1 = 35.0 / 384, _B3 = 500.0 / 1113, _B4 = 125.0 / 192
cdef double _B5 = -2187.0 / 6784, _B6 = 11.0 / 84
cdef double _E1 = 71.0 / 57600, _E3 = -71.0 / 16695, _E4 = 71.0 / 1920
cdef double _E5 = -17253.0 / 339200, _E6 = 22.0 / 525, _E7 = -1.0 / 40


cdef struct Params:
    int kind
    double dim_m1
    double mu_sq
    double lam
    double p
    double g
    const double* tab_r
    const double* tab_a
    const double* tab_m
    Py_ssize_t ntab


cdef inline void _coeffs(const Params* P, double r, double* a, double* m) noexcept nogil:
    cdef double sh, ra, rm, w
    cdef Py_ssize_t lo, hi, mid, n
    if P.kind == 0:
        a[0] = P.dim_m1 / r
        m[0] = P.mu_sq / (r * r)
        return
    if P.kind == 1:
        sh = sinh(r)
        a[0] = P.dim_m1 * cosh(r) / sh
        m[0] = P.mu_sq / (sh * sh)
        return
    n = P.ntab
    if r <= P.tab_r[0]:
        ra = P.tab_a[0]
        rm = P.tab_m[0]
    elif r >= P.tab_r[n - 1]:
        ra = P.tab_a[n - 1]
        rm = P.tab_m[n - 1]
    else:
        lo = 0
        hi = n - 1
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if P.tab_r[mid] <= r:
                lo = mid
            else:
                hi = mid
        w = (r - P.tab_r[lo]) / (P.tab_r[hi] - P.tab_r[lo])
        ra = P.tab_a[lo] + w * (P.tab_a[hi] - P.tab_a[lo])
        rm = P.tab_m[lo] + w * (P.tab_m[hi] - P.tab_m[lo])
    a[0] = ra / r
    m[0] = rm / (r * r)


cdef inline void _rhs(const Params* P, double r, double y0, double y1,
                      double* f0, double* f1) noexcept nogil:
    cdef double a, m, nl
    _coeffs(P, r, &a, &m)
    if P.g != 0.0:
        nl = P.g * pow(fabs(y0), P.p - 1.0) * y0
    else:
        nl = 0.0
    f0[0] = y1
    f1[0] = -a * y1 + (m + P.lam) * y0 - nl


def shoot(int kind, double dim_m1, double mu_sq, double lam, double p, double g,
          double r0, double psi0, double dpsi0,
          const double[::1] grid, const double[::1] tab_r, const double[::1] tab_a,
          const double[::1] tab_m, double rtol, double atol, double h_init,
          bint events, double tail_tol, double grow_cap,
          double[::1] out_psi, double[::1] out_dpsi):
    cdef Params P
    P.kind = kind
    P.dim_m1 = dim_m1
    P.mu_sq = mu_sq
    P.lam = lam
    P.p = p
    P.g = g
    P.tab_r = &tab_r[0]
    P.tab_a = &tab_a[0]
    P.tab_m = &tab_m[0]
    P.ntab = tab_r.shape[0]

    cdef Py_ssize_t ngrid = grid.shape[0]
    cdef double direction = 1.0 if grid[0] > r0 else -1.0
    cdef double r = r0, y0 = psi0, y1 = dpsi0
    cdef double f0, f1
    cdef double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b, k5a, k5b, k6a, k6b, k7a, k7b
    cdef double n0, n1, e0, e1, s0, s1, err, fac, h_next, h_prop, span, target, hs, r_new
    cdef double a, m, kappa, r_event
    cdef double h = fabs(h_init)
    cdef Py_ssize_t k = 0
    cdef double psi_max = fabs(y0)
    cdef bint descended = False, hit
    cdef long nsteps = 0
    cdef int status = END

    with nogil:
        _rhs(&P, r, y0, y1, &f0, &f1)
        r_event = r
        while k < ngrid:
            target = grid[k]
            span = fabs(target - r)
            h_prop = h
            hit = False
            if h >= span:
                h = span
                hit = True
            if h < 1e-14 * (fabs(r) if fabs(r) > 1.0 else 1.0):
                status = UNDERFLOW
                r_event = r
                break
            hs = direction * h
            k1a = f0
            k1b = f1
            _rhs(&P, r + _C2 * hs, y0 + hs * _A21 * k1a, y1 + hs * _A21 * k1b, &k2a, &k2b)
            _rhs(&P, r + _C3 * hs,
                 y0 + hs * (_A31 * k1a + _A32 * k2a),
                 y1 + hs * (_A31 * k1b + _A32 * k2b), &k3a, &k3b)
            _rhs(&P, r + _C4 * hs,
                 y0 + hs * (_A41 * k1a + _A42 * k2a + _A43 * k3a),
                 y1 + hs * (_A41 * k1b + _A42 * k2b + _A43 * k3b), &k4a, &k4b)
            _rhs(&P, r + _C5 * hs,
                 y0 + hs * (_A51 * k1a + _A52 * k2a + _A53 * k3a + _A54 * k4a),
                 y1 + hs * (_A51 * k1b + _A52 * k2b + _A53 * k3b + _A54 * k4b), &k5a, &k5b)
            _rhs(&P, r + hs,
                 y0 + hs * (_A61 * k1a + _A62 * k2a + _A63 * k3a + _A64 * k4a + _A65 * k5a),
                 y1 + hs * (_A61 * k1b + _A62 * k2b + _A63 * k3b + _A64 * k4b + _A65 * k5b),
                 &k6a, &k6b)
            n0 = y0 + hs * (_B1 * k1a + _B3 * k3a + _B4 * k4a + _B5 * k5a + _B6 * k6a)
            n1 = y1 + hs * (_B1 * k1b + _B3 * k3b + _B4 * k4b + _B5 * k5b + _B6 * k6b)
            r_new = target if hit else r + hs
            _rhs(&P, r_new, n0, n1, &k7a, &k7b)
            e0 = hs * (_E1 * k1a + _E3 * k3a + _E4 * k4a + _E5 * k5a + _E6 * k6a + _E7 * k7a)
            e1 = hs * (_E1 * k1b + _E3 * k3b + _E4 * k4b + _E5 * k5b + _E6 * k6b + _E7 * k7b)
            s0 = atol + rtol * (fabs(y0) if fabs(y0) > fabs(n0) else fabs(n0))
            s1 = atol + rtol * (fabs(y1) if fabs(y1) > fabs(n1) else fabs(n1))
            err = fabs(e0) / s0
            if fabs(e1) / s1 > err:
                err = fabs(e1) / s1
            if isnan(err) or not (err <= 1.0):
                if isnan(err) or isnan(e0) or isnan(e1):
                    fac = 0.2
                else:
                    fac = 0.9 * pow(err, -0.2)
                    if fac < 0.2:
                        fac = 0.2
                h = h * fac
                continue
            nsteps += 1
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac < 0.2:
                    fac = 0.2
                if fac > 5.0:
                    fac = 5.0
            h_next = h * fac
            if events:
                if n0 < 0.0:
                    r_event = r + hs * y0 / (y0 - n0)
                    status = CROSS
                    break
                if n0 > psi_max:
                    psi_max = n0
                if direction * n1 < 0.0:
                    descended = True
                elif descended and direction * n1 > 0.0:
                    r_event = r_new
                    status = GROW
                    break
                if n0 > grow_cap and direction * n1 > 0.0:
                    r_event = r_new
                    status = GROW
                    break
                if descended and n0 <= tail_tol * psi_max:
                    _coeffs(&P, r_new, &a, &m)
                    kappa = sqrt(lam + m) + 0.5 * a
                    if n0 > 0.0 and fabs(-direction * n1 / n0 - kappa) <= 0.25 * kappa:
                        if hit:
                            out_psi[k] = n0
                            out_dpsi[k] = n1
                            k += 1
                        r_event = r_new
                        status = DECAY
                        break
            r = r_new
            y0 = n0
            y1 = n1
            f0 = k7a
            f1 = k7b
            if hit:
                out_psi[k] = y0
                out_dpsi[k] = y1
                k += 1
                if fac >= 1.0:
                    h = h_next if h_next > h_prop else h_prop
                else:
                    h = h_next
            else:
                h = h_next
        if status == END:
            r_event = r
    return status, k, r_event, psi_max, nsteps


def solve_tridiagonal(sub, diag, sup, rhs):
    """Thomas algorithm; ``sub[0]`` and ``sup[-1]`` are ignored."""
    if np.iscomplexobj(sub) or np.iscomplexobj(diag) or np.iscomplexobj(sup) \
            or np.iscomplexobj(rhs):
        return _thomas_complex(
            np.ascontiguousarray(sub, dtype=complex), np.ascontiguousarray(diag, dtype=complex),
            np.ascontiguousarray(sup, dtype=complex), np.ascontiguousarray(rhs, dtype=complex))
    return _thomas_real(
        np.ascontiguousarray(sub, dtype=float), np.ascontiguousarray(diag, dtype=float),
        np.ascontiguousarray(sup, dtype=float), np.ascontiguousarray(rhs, dtype=float))


cdef _thomas_real(const double[::1] a, const double[::1] b, const double[::1] c,
                  const double[::1] d):
    cdef Py_ssize_t n = b.shape[0], i
    out = np.empty(n, dtype=float)
    cp_arr = np.empty(n, dtype=float)
    cdef double[::1] x = out
    cdef double[::1] cp = cp_arr
    cdef double den
    if n == 0:
        return out
    with nogil:
        cp[0] = c[0] / b[0]
        x[0] = d[0] / b[0]
        for i in range(1, n):
            den = b[i] - a[i] * cp[i - 1]
            cp[i] = c[i] / den if i < n - 1 else 0.0
            x[i] = (d[i] - a[i] * x[i - 1]) / den
        for i in range(n - 2, -1, -1):
            x[i] = x[i] - cp[i] * x[i + 1]
    return out


cdef _thomas_complex(const double complex[::1] a, const double complex[::1] b,
                     const double complex[::1] c, const double complex[::1] d):
    cdef Py_ssize_t n = b.shape[0], i
    out = np.empty(n, dtype=complex)
    cp_arr = np.empty(n, dtype=complex)
    cdef double complex[::1] x = out
    cdef double complex[::1] cp = cp_arr
    cdef double complex den
    if n == 0:
        return out
    with nogil:
        cp[0] = c[0] / b[0]
        x[0] = d[0] / b[0]
        for i in range(1, n):
            den = b[i] - a[i] * cp[i - 1]
            cp[i] = c[i] / den if i < n - 1 else 0.0
            x[i] = (d[i] - a[i] * x[i - 1]) / den
        for i in range(n - 2, -1, -1):
            x[i] = x[i] - cp[i] * x[i + 1]
    return out


def midpoint_step(const double[::1] sub, const double[::1] diag, const double[::1] sup,
                  const double complex[::1] v, double dt, double p, double g,
                  double tol, int maxit):
    cdef Py_ssize_t n = diag.shape[0], i
    cdef double complex idt = 1j * dt
    cdef double complex igdt = 1j * dt * g
    mid_arr = np.array(v, dtype=complex, copy=True)
    new_arr = np.empty(n, dtype=complex)
    cp_arr = np.empty(n, dtype=complex)
    inv_arr = np.empty(n, dtype=complex)
    out_arr = np.empty(n, dtype=complex)
    cdef double complex[::1] m = mid_arr
    cdef double complex[::1] x = new_arr
    cdef double complex[::1] cp = cp_arr
    cdef double complex[::1] inv = inv_arr
    cdef double complex[::1] out = out_arr
    cdef double complex den, rhs
    cdef double change, scale, dz, az2, fac
    cdef double q = 0.5 * (p - 1.0)
    cdef int qi = <int>q if q == <int>q and 1.0 <= q <= 4.0 else 0
    cdef int it = 0, k
    cdef bint converged = False
    if n == 0:
        return out_arr, 0, True
    with nogil:
        # factor 2 + i dt L once; reused by every fixed-point sweep
        inv[0] = 1.0 / (2.0 + idt * diag[0])
        cp[0] = idt * sup[0] * inv[0]
        for i in range(1, n):
            den = 2.0 + idt * diag[i] - idt * sub[i] * cp[i - 1]
            inv[i] = 1.0 / den
            cp[i] = idt * sup[i] * inv[i] if i < n - 1 else 0.0
        while it < maxit:
            it += 1
            for i in range(n):
                if g != 0.0:
                    # |m|^{p-1} = (|m|^2)^q, integer q without pow
                    az2 = m[i].real * m[i].real + m[i].imag * m[i].imag
                    if qi:
                        fac = az2
                        for k in range(1, qi):
                            fac = fac * az2
                    else:
                        fac = pow(az2, q)
                    rhs = 2.0 * v[i] + igdt * fac * m[i]
                else:
                    rhs = 2.0 * v[i]
                if i == 0:
                    x[i] = rhs * inv[0]
                else:
                    x[i] = (rhs - idt * sub[i] * x[i - 1]) * inv[i]
            for i in range(n - 2, -1, -1):
                x[i] = x[i] - cp[i] * x[i + 1]
            change = 0.0
            scale = 0.0
            for i in range(n):
                dz = (x[i].real - m[i].real) ** 2 + (x[i].imag - m[i].imag) ** 2
                if dz > change:
                    change = dz
                az2 = x[i].real * x[i].real + x[i].imag * x[i].imag
                if az2 > scale:
                    scale = az2
                m[i] = x[i]
            # squared magnitudes on both sides
            if g == 0.0 or change <= tol * tol * scale:
                converged = True
                break
        for i in range(n):
            out[i] = 2.0 * m[i] - v[i]
    return out_arr, it, converged
