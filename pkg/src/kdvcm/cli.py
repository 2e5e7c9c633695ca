"""Command-line front end: stage-by-stage pipeline with machine-readable reports.

Subcommands: eigen, manifold, normal-form, lyapunov, simulate, report-all.
Each stage prints one verdict line per check and writes JSON/CSV artifacts
into --out.  Exit status: 0 all checks pass, 1 any check fails or a
numerical stage errors out, 2 usage errors.  All floating-point output is
rounded to 17 significant digits, so identical configurations produce
byte-identical files.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import constants, lyapunov, manifold, pde, reduced, spectral


def _sig17(obj):
    """Round every float to 17 significant digits (bit-stable round trip)."""
    if isinstance(obj, float):
        return float(f"{obj:.17g}")
    if isinstance(obj, dict):
        return {k: _sig17(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sig17(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(f"{float(obj):.17g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_sig17(obj), fh, indent=2)
        fh.write("\n")


class Checks:
    """Collects named pass/fail verdicts and prints one line per check."""

    def __init__(self):
        self.rows = []

    def add(self, name, value, ok, target=None):
        self.rows.append({"name": name, "value": value, "ok": bool(ok),
                          "target": target})
        tgt = "" if target is None else f" target={target:g}"
        print(f"{name}={value:.6g}{tgt} {'PASS' if ok else 'FAIL'}")

    @property
    def ok(self):
        return all(r["ok"] for r in self.rows)


class Pipeline:
    """Lazily built shared stages, so report-all computes everything once."""

    def __init__(self):
        self._cache = {}

    def eigen_pair(self):
        return self._get("pair", spectral.build_eigen_pair)

    def manifold_coeffs(self):
        return self._get("mc", lambda: manifold.build_manifold(self.eigen_pair()))

    def reduced_model(self):
        return self._get(
            "model", lambda: reduced.build_reduced_model(
                self.manifold_coeffs(), self.eigen_pair()))

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]


def cmd_eigen(args, pipe: Pipeline, checks: Checks):
    pair = pipe.eigen_pair()
    r1, r2 = spectral.eigen_residual(pair)
    checks.add("q", pair.q, abs(pair.q - constants.Q) < 1e-14)
    checks.add("eigen_residual", max(r1, r2), max(r1, r2) <= 1e-10)
    rows = spectral.integral_identities(pair)
    worst = max(abs(v - e) for _, v, e in rows)
    checks.add("identity_defect", worst, worst <= 1e-12)
    report = spectral.discrete_spectrum(args.grid_size)
    checks.add("spectrum_gap", report.gap, report.gap < 0.0)
    pair_err = abs(report.nearest_pair - 1j * constants.Q)
    checks.add("nearest_pair_error", pair_err, pair_err <= 1e-2)
    _write_json(os.path.join(args.out, "eigenpair.json"), {
        "q": pair.q,
        "theta": pair.theta,
        "phi1": pair.phi1.to_dict(),
        "phi2": pair.phi2.to_dict(),
        "residuals": {"phi1": r1, "phi2": r2},
        "identities": [
            {"label": lbl, "value": v, "expected": e} for lbl, v, e in rows
        ],
    })
    _write_json(os.path.join(args.out, "spectrum.json"), report.to_dict())


def cmd_manifold(args, pipe: Pipeline, checks: Checks):
    pair = pipe.eigen_pair()
    mc = pipe.manifold_coeffs()
    ra, rb, rc = manifold.residuals(mc, pair)
    checks.add("ode_residual", max(ra, rb, rc), max(ra, rb, rc) <= 1e-9)
    bvals = manifold.boundary_values(mc)
    worst_bc = max(abs(v) for triple in bvals.values() for v in triple)
    checks.add("boundary_defect", worst_bc, worst_bc <= 1e-10)
    worst_perp = max(
        abs(f.inner(phi))
        for f in (mc.a, mc.b, mc.c)
        for phi in (pair.phi1, pair.phi2)
    )
    checks.add("m_perp_defect", worst_perp, worst_perp <= 1e-9)
    checks.add("c_prime0", mc.c_prime0,
               abs(mc.c_prime0 - constants.CPRIME0_REF) <= constants.CPRIME0_TOL,
               target=constants.CPRIME0_REF)
    oracle = manifold.bvp_oracle(pair, grid_size=args.grid_size)
    gaps = manifold.oracle_disagreement(mc, oracle)
    checks.add("oracle_gap", max(gaps.values()), max(gaps.values()) <= 1e-5)
    checks.add("oracle_c_prime0", oracle.c_prime0,
               abs(oracle.c_prime0 - constants.CPRIME0_REF) <= 1e-3,
               target=constants.CPRIME0_REF)
    doc = mc.to_dict()
    doc["oracle"] = {
        "gridSize": oracle.grid_size,
        "supNormGap": gaps,
        "aPrime0": oracle.a_prime0,
        "bPrime0": oracle.b_prime0,
        "cPrime0": oracle.c_prime0,
    }
    _, rep_minus = manifold.solve_f_minus_detailed(
        manifold.build_sources(pair))
    doc["printedB4"] = {
        "printed": rep_minus.printed_b4,
        "derived": rep_minus.derived_b4,
        "agrees": rep_minus.printed_b4_agrees,
    }
    _write_json(os.path.join(args.out, "manifold.json"), doc)
    if args.dump_manifold:
        _write_json(args.dump_manifold, mc.to_dict())


def cmd_normal_form(args, pipe: Pipeline, checks: Checks):
    model = pipe.reduced_model()
    checks.add("rho1", model.rho1,
               abs(model.rho1 - constants.RHO1_REF) <= constants.RHO1_TOL,
               target=constants.RHO1_REF)
    checks.add("rho1_alt", model.rho1_alt,
               abs(model.rho1_alt - constants.RHO1_REF) <= constants.RHO1_TOL,
               target=constants.RHO1_REF)
    checks.add("g02", abs(model.g02), abs(model.g02) == 0.0)
    fitted = reduced.fitted_rho1(model)
    checks.add("rho1_fit", fitted, abs(fitted - model.rho1) <= 0.05 * abs(model.rho1))
    doc = model.to_dict()
    doc["rho1Fitted"] = fitted
    doc["rho1Reference"] = constants.RHO1_REF
    _write_json(os.path.join(args.out, "normalform.json"), doc)
    # the two printed-variant comparisons are informational; the gate is
    # whether either variant reproduces the reference value
    either_ok = checks.rows[0]["ok"] or checks.rows[1]["ok"]
    if not either_ok:
        print("rho1 reference not reproduced by either variant "
              "(see README.md); fit-arbitrated value is "
              f"{model.rho1:.6g}")


def cmd_lyapunov(args, pipe: Pipeline, checks: Checks):
    mc = pipe.manifold_coeffs()
    model = pipe.reduced_model()
    data = lyapunov.lyapunov_data(mc, mu=args.mu)
    direct, closed = lyapunov.sylvester_det_both(
        mc.a_prime0, mc.b_prime0, mc.c_prime0)
    checks.add("detS", direct,
               abs(direct - constants.DETS_REF) <= constants.DETS_TOL,
               target=constants.DETS_REF)
    agree = abs(direct - closed) <= 1e-12 * max(1.0, abs(direct))
    checks.add("detS_route_gap", abs(direct - closed), agree)
    checks.add("nondegenerate", 1.0 if lyapunov.nondegeneracy_check(data) else 0.0,
               lyapunov.nondegeneracy_check(data))
    smin, eta1 = lyapunov.sphere_minimum(data, samples=args.samples, seed=args.seed)
    checks.add("sphere_min", smin, smin > 0.0)
    quartic = lyapunov.energy_quartic(mc)
    scan = lyapunov.vtilde_dot_scan(data, model, quartic,
                                    radius=args.radius, samples=args.samples,
                                    seed=args.seed)
    checks.add("max_vdot", scan.max_vdot, scan.max_vdot < 0.0)
    half = lyapunov.vtilde_dot_scan(data, model, quartic,
                                    radius=0.5 * args.radius,
                                    samples=args.samples, seed=args.seed)
    ratio = scan.max_vdot / half.max_vdot
    checks.add("vdot_scaling_ratio", ratio, 12.0 <= ratio <= 20.0)
    doc = scan.to_dict()
    doc["detS"] = {"direct": direct, "closedForm": closed,
                   "printedForm": lyapunov.sylvester_det_printed_form(
                       mc.a_prime0, mc.b_prime0, mc.c_prime0)}
    doc["sphereMin"] = smin
    doc["halfRadius"] = half.to_dict()
    doc["muSweep"] = {
        f"{mu:g}": res.to_dict()
        for mu, res in lyapunov.mu_sweep(
            mc, model, radius=args.radius, samples=args.samples).items()
    }
    _write_json(os.path.join(args.out, "lyapunov.json"), doc)


def cmd_simulate(args, pipe: Pipeline, checks: Checks):
    pair = pipe.eigen_pair()
    mc = pipe.manifold_coeffs()
    solver = pde.KdVSolver(n=args.grid_size, nonlinear="midpoint")
    frame = pde.modal_frame(solver.grid, pair, mc)
    x = solver.grid.nodes
    # on-surrogate base point plus an off-manifold bump: the transient gives
    # the attraction rate, the tail feeds the energy diagnostics
    y0 = pde.surrogate_values(frame, 1e-2, 0.0)
    bump = np.sin(np.pi * x / constants.L) ** 2 * np.sin(3 * np.pi * x / constants.L)
    y0 = y0 + 2e-3 * bump / math.sqrt(2 * solver.energy(bump))
    report = solver.solve(y0, args.horizon, args.dt, frame=frame,
                          record_every=args.record_every)
    checks.add("max_energy_increase", report.max_energy_increase,
               report.max_energy_increase <= 1e-10 * report.energy0)
    # the energy-identity gate runs on the canonical configuration: a pure
    # eigenmode at the command's grid; the 1e-3 threshold is stated at n=512
    # and scales at second order on coarser grids
    dt_defect = 0.02 * 513.0 / (args.grid_size + 1)
    defect_run = solver.solve(1e-2 * pair.phi1(x), 40.0, dt_defect,
                              record_every=max(1, round(0.1 / dt_defect)))
    defect = pde.energy_identity_check(defect_run)
    threshold = 1e-3 * max(1.0, (513.0 / (args.grid_size + 1)) ** 2)
    checks.add("energy_identity_defect", defect, defect <= threshold)
    omega_hat, _ = pde.transient_decay_rate(report)
    checks.add("omega_hat", omega_hat, omega_hat > 0.0)
    slope, r2 = pde.inverse_energy_slope(report)
    rho1_hat = -0.5 * slope
    summary = {
        "omegaHat": omega_hat,
        "rho1Hat": rho1_hat,
        "energyDefect": defect,
        "mainRunDefect": pde.energy_identity_check(report),
        "inverseEnergySlopeR2": r2,
        "gridSize": report.grid_size,
        "dt": report.dt,
        "horizon": args.horizon,
        "maxEnergyIncrease": report.max_energy_increase,
    }
    pde.write_reports(report, args.out)
    _write_json(os.path.join(args.out, "summary.json"), summary)


_COMMANDS = {
    "eigen": cmd_eigen,
    "manifold": cmd_manifold,
    "normal-form": cmd_normal_form,
    "lyapunov": cmd_lyapunov,
    "simulate": cmd_simulate,
}

_DEFAULTS = {
    "eigen": {"grid_size": 512},
    "manifold": {"grid_size": 2000},
    "normal-form": {},
    "lyapunov": {"mu": 1e-3, "radius": 1e-2, "samples": 10000, "seed": None},
    "simulate": {"grid_size": 512, "dt": 0.05, "horizon": 300.0,
                 "record_every": 4},
    "report-all": {},
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kdvcm",
        description="Center-manifold stability pipeline for the critical-length KdV equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(_COMMANDS) + ["report-all"]:
        p = sub.add_parser(name)
        p.add_argument("--grid-size", type=int, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--horizon", type=float, default=None)
        p.add_argument("--mu", type=float, default=None)
        p.add_argument("--radius", type=float, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--record-every", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--config", type=str, default=None)
        if name == "manifold":
            p.add_argument("--dump-manifold", type=str, default=None)
    return parser


def _merge_config(args):
    """Flags override the config file, which overrides per-command defaults."""
    file_cfg = {}
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
    merged = dict(_DEFAULTS.get(args.command, {}))
    for key, val in file_cfg.items():
        merged[key.replace("-", "_")] = val
    for key, val in vars(args).items():
        if val is not None or key not in merged:
            if val is not None:
                merged[key] = val
    merged.setdefault("out", "out")
    for key, val in merged.items():
        setattr(args, key, val)
    if not hasattr(args, "dump_manifold"):
        args.dump_manifold = None
    return args


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    args = _merge_config(args)
    os.makedirs(args.out, exist_ok=True)
    pipe = Pipeline()
    checks = Checks()
    try:
        if args.command == "report-all":
            stage_rows = {}
            for name in ("eigen", "manifold", "normal-form", "lyapunov", "simulate"):
                print(f"== {name} ==")
                stage_args = argparse.Namespace(**vars(args))
                for key, val in _DEFAULTS[name].items():
                    if getattr(stage_args, key, None) is None:
                        setattr(stage_args, key, val)
                stage_checks = Checks()
                _COMMANDS[name](stage_args, pipe, stage_checks)
                stage_rows[name] = stage_checks.rows
                checks.rows.extend(stage_checks.rows)
            _write_json(os.path.join(args.out, "summary.json"),
                        {"stages": stage_rows, "allPass": checks.ok})
        else:
            _COMMANDS[args.command](args, pipe, checks)
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0 if checks.ok else 1


if __name__ == "__main__":
    sys.exit(main())
