"""Batch command line front-end.

Every run writes its outputs under an ``--out`` prefix together with
``<prefix>.manifest.json``, which echoes the fully resolved configuration.
``vortexlab --manifest FILE`` replays it.

Exit codes: 0 success, 2 invalid input, 3 solver failure or
non-convergence, 4 invariant alarm. Errors go to stderr as one JSON line.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, dynamics, geometry, io, profile_solver as ps
from . import representations as reps_mod
from . import variational as var
from .errors import (
    ConfigurationError,
    ConvergenceError,
    InvariantViolation,
    SolverError,
    ValidationError,
    VortexLabError,
)

SUBCOMMANDS = ("profile", "flambda", "energy", "weinstein", "threshold", "sweep",
               "axial", "evolve", "reps", "check-manifold")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _int_list(text):
    try:
        return [int(x) for x in str(text).split(",") if x.strip() != ""]
    except ValueError:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from None


def _add_common(sp, list_levels=False):
    g = sp.add_argument_group("manifold and representation")
    g.add_argument("--preset", help="r2 | r3 | r4 | h2 | extball2")
    g.add_argument("--manifold", help="manifold JSON document or path to one")
    g.add_argument("--n", type=int, help="dimension for the default Euclidean manifold")
    g.add_argument("--group", default="son", choices=["son", "so4", "su2", "u2"])
    kind = str if list_levels else int
    g.add_argument("--ell", type=kind, default="0" if list_levels else 0,
                   help="SO(n) harmonic level" + (" (comma list)" if list_levels else ""))
    g.add_argument("--j", type=kind, default=None)
    g.add_argument("--k", type=int, default=None)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--mu-sq", type=float, default=None, help="override mu_pi^2")
    sp.add_argument("--out", default=None, help="output path prefix")
    sp.add_argument("--seed", type=int, default=0)


def _add_solver(sp, lam=True, beta=False):
    sp.add_argument("--p", type=float, default=3.0)
    if lam:
        sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    if beta:
        sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--h", type=float, default=0.005, help="radial grid spacing")
    sp.add_argument("--r-max", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="vortexlab", description="Vortex standing waves of focusing NLS")
    ap.add_argument("--version", action="version", version=f"vortexlab {__version__}")
    ap.add_argument("--manifest", help="replay a manifest written by an earlier run")
    ap.add_argument("--out", dest="manifest_out", default=None,
                    help="with --manifest: write to this prefix instead")
    sub = ap.add_subparsers(dest="subcommand", parser_class=_Parser)

    sp = sub.add_parser("profile", help="ground-state profile by shooting")
    _add_common(sp)
    _add_solver(sp)

    for name, helptext in (("flambda", "minimize F_lambda at fixed J_p = beta"),
                           ("energy", "minimize E at fixed mass beta")):
        sp = sub.add_parser(name, help=helptext)
        _add_common(sp)
        _add_solver(sp, lam=name == "flambda", beta=True)

    for name, helptext in (("weinstein", "Weinstein supremum and Q_pi"),
                           ("threshold", "mass threshold from the Weinstein constant")):
        sp = sub.add_parser(name, help=helptext)
        _add_common(sp)
        _add_solver(sp, lam=False)

    sp = sub.add_parser("sweep", help="monotonicity of W, I, E across classes")
    _add_common(sp, list_levels=True)
    _add_solver(sp, lam=True, beta=True)
    sp.add_argument("--p-energy", type=float, default=None,
                    help="exponent for the energy column (omit to skip E)")
    sp.add_argument("--beta-energy", type=float, default=None)
    sp.add_argument("--margin", type=float, default=1e-3)
    sp.add_argument("--workers", type=int, default=None)

    sp = sub.add_parser("axial", help="axial vortex on R^{n+1}")
    _add_common(sp)
    sp.add_argument("--p", type=float, default=3.0)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--R", type=float, default=14.0)
    sp.add_argument("--Y", type=float, default=14.0)
    sp.add_argument("--nr", type=int, default=256)
    sp.add_argument("--ny", type=int, default=512)
    sp.add_argument("--binary", action="store_true", help="also write an AXV1 dump")

    sp = sub.add_parser("evolve", help="mass-critical NLS experiments")
    _add_common(sp)
    sp.add_argument("--mode", default="threshold", choices=["threshold", "scatter"])
    sp.add_argument("--fraction", type=float, default=0.9)
    sp.add_argument("--T", type=float, default=2.0)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--grid", type=float, default=0.005, help="radial spacing h")
    sp.add_argument("--r-max", type=float, default=None,
                    help="grid radius (default 30 for threshold, 120 for scatter)")
    sp.add_argument("--gaussian-focus", action="store_true")
    sp.add_argument("--width", type=float, default=1.0)
    sp.add_argument("--sample-dt", type=float, default=None)

    sp = sub.add_parser("reps", help="representation tables and generators")
    sp.add_argument("--group", default="u2", choices=["son", "so4", "su2", "u2"])
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--ell", type=int, default=None)
    sp.add_argument("--j", type=int, default=2)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--out", default=None)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("check-manifold", help="validate a manifold and its decay hypotheses")
    sp.add_argument("--preset")
    sp.add_argument("--manifold")
    sp.add_argument("--n", type=int)
    sp.add_argument("--r-probe", type=float, default=1024.0)
    sp.add_argument("--out", default=None)
    sp.add_argument("--seed", type=int, default=0)
    return ap


# config resolution

def _manifold(cfg):
    if cfg.get("preset") and cfg.get("manifold"):
        raise ConfigurationError("give either --preset or --manifold, not both")
    if cfg.get("manifold"):
        text = cfg["manifold"]
        if not text.lstrip().startswith("{"):
            try:
                text = Path(text).read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigurationError(f"cannot read manifold file: {exc}") from None
        return geometry.load_manifold(text)
    if cfg.get("preset"):
        return geometry.preset(cfg["preset"])
    return geometry.euclidean(cfg.get("n") or 2)


def _rep(cfg, m, level=None):
    group = cfg.get("group", "son")
    if group == "son":
        ell = cfg.get("ell") if level is None else level
        return reps_mod.son_rep(m.n, int(ell))
    if m.n != 4:
        raise ConfigurationError(f"group {group} acts on S^3; manifold has n = {m.n}")
    j = cfg.get("j") if level is None else level
    if j is None:
        raise ValidationError(f"group {group} needs --j")
    if group == "so4":
        k = cfg.get("k")
        return reps_mod.so4_pair_rep(int(j), int(j if k is None else k))
    if group == "su2":
        return reps_mod.su2_rep(int(j))
    return reps_mod.u2_rep(int(j), int(cfg.get("m") or 0))


def _positive(cfg, *keys):
    for key in keys:
        val = cfg.get(key)
        if val is not None and not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
            raise ValidationError(f"--{key.replace('_', '-')} must be positive, got {val!r}")


def _validate(cfg):
    _positive(cfg, "beta", "h", "r_max", "T", "dt", "grid", "fraction", "width", "R", "Y",
              "sample_dt", "beta_energy", "margin", "r_probe", "workers")
    for key in ("nr", "ny"):
        if cfg.get(key) is not None and cfg[key] < 8:
            raise ValidationError(f"--{key} must be at least 8")
    p = cfg.get("p")
    if p is not None and not (math.isfinite(p) and p > 1):
        raise ValidationError(f"--p must exceed 1, got {p!r}")
    if cfg.get("mu_sq") is not None and cfg["mu_sq"] < 0:
        raise ValidationError("--mu-sq must be nonnegative")
    for key in ("ell", "j", "k"):
        val = cfg.get(key)
        if isinstance(val, int) and val < 0:
            raise ValidationError(f"--{key} must be nonnegative")


def _problem(cfg, m, rep, **kw):
    return ps.ProfileProblem(m, rep, cfg["p"], kw.get("lam", cfg.get("lam", 1.0)),
                             r_max=cfg.get("r_max"), h=cfg["h"],
                             mu_sq_override=cfg.get("mu_sq"))


def _prefix(cfg):
    return cfg.get("out") or cfg["subcommand"]


# subcommand runners; each returns (summary dict, converged flag)

def _run_profile(cfg):
    m = _manifold(cfg)
    prof = ps.bisect_ground(_problem(cfg, m, _rep(cfg, m)))
    prefix = _prefix(cfg)
    ps.write_profile(prof, prefix)
    return {"el_residual": prof.residual, "mass": prof.mass,
            "shoot_amplitude": prof.shoot_amplitude}, True


def _write_result(res, prefix):
    ps.write_profile(res.minimizer, prefix)
    io.write_json(f"{prefix}.result.json", res.summary())


def _run_flambda(cfg):
    m = _manifold(cfg)
    res = var.flambda_minimize(_problem(cfg, m, _rep(cfg, m)), cfg["beta"])
    _write_result(res, _prefix(cfg))
    return res.summary(), res.converged


def _run_energy(cfg):
    m = _manifold(cfg)
    res = var.energy_minimize(_problem(cfg, m, _rep(cfg, m), lam=1.0), cfg["beta"])
    _write_result(res, _prefix(cfg))
    return res.summary(), res.converged


def _run_weinstein(cfg):
    m = _manifold(cfg)
    res = var.weinstein_sup(_problem(cfg, m, _rep(cfg, m), lam=1.0))
    _write_result(res, _prefix(cfg))
    return res.summary(), res.converged


def _run_threshold(cfg):
    m = _manifold(cfg)
    res = var.weinstein_sup(_problem(cfg, m, _rep(cfg, m), lam=1.0))
    thr = var.mass_threshold(res.value, cfg["p"])
    doc = {"W": res.value, "p": cfg["p"], "threshold_norm": thr,
           "threshold_mass": thr ** 2, "Q_norm": math.sqrt(res.minimizer.mass),
           "converged": res.converged}
    io.write_json(f"{_prefix(cfg)}.json", doc)
    return doc, res.converged


def _run_sweep(cfg):
    m = _manifold(cfg)
    levels = _int_list(cfg["ell"] if cfg.get("group", "son") == "son" else cfg.get("j"))
    if not levels:
        raise ValidationError("sweep needs at least one level")
    reps = [_rep(cfg, m, lv) for lv in levels]
    template = _problem(cfg, m, reps[0])
    report = var.monotonicity_sweep(template, reps, beta=cfg["beta"],
                                    p_energy=cfg.get("p_energy"),
                                    beta_energy=cfg.get("beta_energy"),
                                    margin=cfg["margin"], workers=cfg.get("workers"))
    io.write_csv(f"{_prefix(cfg)}.csv", ["mu_sq", "W", "I", "E", "threshold"], report.csv_rows())
    doc = {"monotone": report.monotone, "violations": report.violations,
           "converged": all(r.converged for r in report.rows)}
    io.write_json(f"{_prefix(cfg)}.json", doc)
    report.check()
    return doc, doc["converged"]


def _run_axial(cfg):
    from . import axial_solver as ax

    m = geometry.euclidean(cfg.get("n") or 2) if not (cfg.get("preset") or cfg.get("manifold")) else _manifold(cfg)
    if m.area is not geometry.AreaKind.EUCLIDEAN or m.interval is not geometry.IntervalKind.FULL:
        raise ConfigurationError("axial solves live on Euclidean space")
    prob = ax.AxialProblem(m.n, _rep(cfg, m), cfg["p"], cfg["lam"], R=cfg["R"], Y=cfg["Y"],
                           nr=cfg["nr"], ny=cfg["ny"], mu_sq_override=cfg.get("mu_sq"))
    sol = ax.axial_minimize(prob, beta=cfg["beta"])
    prefix = _prefix(cfg)
    ax.write_csv(sol, f"{prefix}.csv")
    meta = sol.metadata()
    meta["kinetic_crosscheck"] = ax.kinetic_crosscheck(sol, prob)
    meta["min_interior"] = float(np.min(sol.psi))
    io.write_json(f"{prefix}.json", meta)
    if cfg.get("binary"):
        ax.write_axv1(sol, f"{prefix}.axv1")
    return meta, sol.converged


def _run_evolve(cfg):
    m = _manifold(cfg)
    rep = _rep(cfg, m)
    p = var.mass_critical(m.n)
    prefix = _prefix(cfg)
    prob = ps.ProfileProblem(m, rep, p, 1.0, h=cfg["grid"], mu_sq_override=cfg.get("mu_sq"))
    sup = var.weinstein_sup(prob)
    # dispersing data must not reach the outer boundary before t = 16
    r_max = cfg.get("r_max") or (30.0 if cfg["mode"] == "threshold" else 120.0)
    grid = dynamics.threshold_grid(sup.minimizer, r_max)
    if cfg["mode"] == "threshold":
        res = dynamics.threshold_experiment(sup, cfg["fraction"], cfg["T"], dt=cfg["dt"],
                                            gaussian_focus=cfg["gaussian_focus"],
                                            width=cfg["width"], grid=grid)
        trace = res.trace
        doc = res.to_json()
        doc["W"] = sup.value
        doc["Q_mass"] = sup.minimizer.mass
    else:
        if cfg["T"] < 16:
            raise ValidationError("scatter mode samples t = 2, 4, 8, 16; need --T >= 16")
        v0 = dynamics.scale_to_mass(dynamics.gaussian_state(grid, 1.0, cfg["width"]),
                                    cfg["fraction"] ** 2 * sup.minimizer.mass)
        sdt = cfg.get("sample_dt") or 0.08
        trace = dynamics.run(v0, cfg["T"], cfg["dt"], sample_dt=sdt)
        dec = dynamics.decay_check(trace, 4.0)
        sc = dynamics.scattering_diagnostic(trace, [2.0, 4.0, 8.0, 16.0], cfg["dt"])
        doc = {"decay_slope_L4": dec.slope, "decay_predicted": dec.predicted,
               "decay_ok": dec.ok, "scattering_times": sc.times,
               "scattering_increments": sc.increments, "increments_decreasing": sc.decreasing}
    cols = ["t", "mass", "energy", "grad_sq", "f", "fprime", "L4", "Linf"]
    io.write_csv(f"{prefix}.timeseries.csv", cols, ([row[c] for c in cols] for row in trace.rows))
    fin = trace.final
    io.write_csv(f"{prefix}.final.csv", ["r", "re", "im", "abs"],
                 zip(fin.grid.r.tolist(), fin.v.real.tolist(), fin.v.imag.tolist(),
                     np.abs(fin.v).tolist()))
    io.write_json(f"{prefix}.verdict.json", doc)
    return doc, True


def _poly_doc(poly):
    return {"polynomial": poly.to_json(), "degree": poly.degree, "harmonic": poly.is_harmonic()}


def _run_reps(cfg):
    group = cfg["group"]
    if group == "son":
        ell = cfg.get("ell") if cfg.get("ell") is not None else cfg["j"]
        doc = {"group": "SO(n)", "rep": reps_mod.son_rep(cfg["n"], ell).to_json()}
    elif group == "so4":
        j = cfg["j"]
        k = j if cfg.get("k") is None else cfg["k"]
        rep = reps_mod.so4_pair_rep(j, k)
        doc = {"group": "SO(4)", "rep": rep.to_json(),
               "clebsch_gordan": [str(d) for d in reps_mod.clebsch_gordan_decompose(j, k)],
               "pairing_admissible": reps_mod.so4_pairing_admissible(j, k)}
    elif group == "su2":
        doc = {"group": "SU(2)", "rep": reps_mod.su2_rep(cfg["j"]).to_json()}
    else:
        j = cfg["j"]
        ms = [cfg["m"]] if cfg.get("m") is not None else [m for m, _ in reps_mod.h_decomposition_dims(j)]
        blocks = []
        for mm in ms:
            entry = {"m": mm, "rep": reps_mod.u2_rep(j, mm).to_json(),
                     "dim": reps_mod.harmonic_block_dim(j, mm)}
            entry.update(_poly_doc(reps_mod.u2_invariant_generator(j, mm)))
            blocks.append(entry)
        doc = {"group": "U(2)", "j": j, "decomposition": reps_mod.h_decomposition_dims(j),
               "blocks": blocks}
    text = io.json_text(doc)
    sys.stdout.write(text)
    if cfg.get("out"):
        io.write_json(f"{cfg['out']}.json", doc)
    return None, True


def _run_check_manifold(cfg):
    m = _manifold(cfg)
    rep = geometry.decay_hypothesis_check(m, cfg["r_probe"])
    r = np.array([0.5, 1.0, 2.0, 4.0]) + (1.0 if m.interval is geometry.IntervalKind.EXTERIOR else 0.0)
    doc = {"manifold": m.to_json(), "integral_condition": rep.integral_condition,
           "growth_condition": rep.growth_condition, "tail_ratio": rep.tail_ratio,
           "sample_r": r.tolist(), "area": geometry.area_density(m, r).tolist(),
           "log_area_derivative": geometry.log_area_derivative(m, r).tolist()}
    text = io.json_text(doc)
    sys.stdout.write(text)
    if cfg.get("out"):
        io.write_json(f"{cfg['out']}.json", doc)
    return None, True


RUNNERS = {
    "profile": _run_profile,
    "flambda": _run_flambda,
    "energy": _run_energy,
    "weinstein": _run_weinstein,
    "threshold": _run_threshold,
    "sweep": _run_sweep,
    "axial": _run_axial,
    "evolve": _run_evolve,
    "reps": _run_reps,
    "check-manifold": _run_check_manifold,
}


def manifest(cfg) -> dict:
    return {"tool": "vortexlab", "version": __version__, "config": cfg}


def run(cfg: dict) -> int:
    """Validate, dispatch and write outputs plus manifest. Raises package errors."""
    cmd = cfg.get("subcommand")
    if cmd not in RUNNERS:
        raise ValidationError(f"unknown subcommand {cmd!r}")
    _validate(cfg)
    if cfg.get("out"):
        io.write_json(f"{cfg['out']}.manifest.json", manifest(cfg))
    elif cmd not in ("reps", "check-manifold"):
        io.write_json(f"{_prefix(cfg)}.manifest.json", manifest(cfg))
    summary, converged = RUNNERS[cmd](cfg)
    if summary is not None:
        sys.stdout.write(json.dumps(io.to_jsonable(summary), sort_keys=True) + "\n")
    if not converged:
        raise ConvergenceError(f"{cmd}: solver did not reach its tolerance")
    return 0


def config_from_args(argv) -> dict:
    ns = build_parser().parse_args(argv)
    if ns.manifest:
        try:
            doc = json.loads(Path(ns.manifest).read_text(encoding="utf-8"))
            cfg = dict(doc["config"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ConfigurationError(f"unreadable manifest: {exc}") from None
        if ns.manifest_out:
            cfg["out"] = ns.manifest_out
        return cfg
    if ns.subcommand is None:
        raise ValidationError("a subcommand or --manifest is required")
    cfg = {k: v for k, v in vars(ns).items() if k not in ("manifest", "manifest_out")}
    return cfg


def _emit_error(exc, code):
    doc = {"error": type(exc).__name__, "exit": code, "message": str(exc).replace("\n", " ")}
    sys.stderr.write(json.dumps(doc, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        return run(cfg)
    except ValidationError as exc:
        return _emit_error(exc, 2)
    except SolverError as exc:
        return _emit_error(exc, 3)
    except InvariantViolation as exc:
        return _emit_error(exc, 4)
    except VortexLabError as exc:
        return _emit_error(exc, 2)


if __name__ == "__main__":
    sys.exit(main())
