"""Compare the compiled and pure-Python kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--nodes N]

Each kernel runs on identical inputs in both backends; the table reports
the best wall time per call, the speed-up and the largest output difference.
"""
import argparse
import timeit

import numpy as np

from vortexlab import geometry, kernels, profile_solver as ps, representations as reps
from vortexlab.grid import RadialGrid


def _shoot_case(impl, ell):
    prob = ps.ProfileProblem(geometry.euclidean(2), reps.son_rep(2, ell), 3.0, 1.0)
    prof = ps.bisect_ground(prob)
    kind, tr, ta, tm = ps._coefficient_setup(prob)
    r0, psi0, dpsi0 = ps._start(prob, prof.shoot_amplitude)
    grid = np.ascontiguousarray(prob.radial_grid().r)

    def call():
        out_psi = np.zeros(grid.size)
        out_dpsi = np.zeros(grid.size)
        impl.shoot(kind, 1.0, float(prob.mu_sq), 1.0, 3.0, 1.0, r0, psi0, dpsi0, grid,
                   tr, ta, tm, ps.RTOL, ps.ATOL, 1e-3 * r0, True, 0.0, 1e6,
                   out_psi, out_dpsi)
        return out_psi

    return call


def _tridiag_case(impl, nodes):
    g = RadialGrid.build(geometry.euclidean(2), 1.0, 20.0 / nodes, 20.0)
    sub, diag, sup = g.stiffness_bands()
    diag = diag + g.weights
    rhs = np.random.default_rng(0).standard_normal(g.size)
    return lambda: impl.solve_tridiagonal(sub, diag, sup, rhs)


def _midpoint_case(impl, nodes):
    g = RadialGrid.build(geometry.euclidean(2), 0.0, 20.0 / nodes, 20.0)
    sub, diag, sup = (np.ascontiguousarray(b) for b in g.operator_bands())
    v = (2.0 * np.exp(-g.r ** 2)).astype(complex)
    return lambda: impl.midpoint_step(sub, diag, sup, v, 1e-3, 3.0, 1.0, 1e-12, 30)[0]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--nodes", type=int, default=4000)
    args = ap.parse_args(argv)

    impls = kernels.implementations()
    if "compiled" not in impls:
        print("compiled extension not built; timing the Python backend only")
    cases = {
        "shoot l=0": lambda impl: _shoot_case(impl, 0),
        "shoot l=2": lambda impl: _shoot_case(impl, 2),
        f"tridiagonal N={args.nodes}": lambda impl: _tridiag_case(impl, args.nodes),
        f"midpoint N={args.nodes}": lambda impl: _midpoint_case(impl, args.nodes),
    }
    print(f"{'kernel':<22}{'python [ms]':>14}{'compiled [ms]':>16}{'speed-up':>10}{'max diff':>12}")
    for name, make in cases.items():
        times, outs = {}, {}
        for key, impl in impls.items():
            fn = make(impl)
            outs[key] = np.asarray(fn())
            number = 1 if key == "python" else 10
            times[key] = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
        py = times["python"] * 1e3
        if "compiled" in times:
            co = times["compiled"] * 1e3
            diff = float(np.max(np.abs(outs["python"] - outs["compiled"])))
            print(f"{name:<22}{py:>14.3f}{co:>16.3f}{py / co:>10.1f}{diff:>12.2e}")
        else:
            print(f"{name:<22}{py:>14.3f}{'-':>16}{'-':>10}{'-':>12}")


if __name__ == "__main__":
    main()
