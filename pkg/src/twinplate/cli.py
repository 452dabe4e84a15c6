"""Command-line entry point: configured experiments in, reports out.

Every subcommand reads one TOML configuration, runs its pipeline, and writes
CSV/JSON (and PNG figures unless disabled) into the output directory, plus a
run report echoing the configuration, its hash, artifact paths and timings.
Identical configuration and seed reproduce the CSV/JSON bytes exactly;
timings live only in run.json, which is exempt from that guarantee.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .abstract_modes import AbstractConfig, theta_exponent_sweep
from .acceptance import run_all
from .config import (
    ExperimentConfig,
    build_profile,
    build_system,
    build_grid,
    config_hash,
    config_to_dict,
    parse_config,
)
from .damping import validate_coercive, validate_structural
from .errors import NotApplicableError, TwinplateError
from .evolution import (
    default_initial_state,
    dissipation_identity_residual,
    evolve,
    fit_decay_rate,
    telescoped_residual,
)
from .reports import RunReport, write_csv, write_json
from .resolvent import (
    gevrey_bound_check,
    resolved_frequency_cap,
    resolvent_norm,
    sweep,
    uniform_bound_check,
)
from .spectral import eigenvalues

SUBCOMMANDS = (
    "spectrum",
    "resolvent-sweep",
    "evolve",
    "abstract-sweep",
    "validate-damping",
    "full-acceptance",
)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twinplate",
        description="coupled-plate numerical laboratory",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", type=Path, default=None,
                        help="TOML configuration file (defaults apply if omitted)")
    parser.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory (created if missing)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the configured seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="parallel workers for sweep points")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering")
    return parser


def _figures_enabled(cfg: ExperimentConfig, args) -> bool:
    return cfg.output.figures and not args.no_figures


def _run_spectrum(cfg, out: Path, report: RunReport, figures: bool):
    gen, form = build_system(cfg)
    spec = eigenvalues(gen, form)
    cap = resolved_frequency_cap(gen)
    ev = spec.eigenvalues
    report.add_output("spectrum_csv", write_csv(
        out / "spectrum.csv",
        ["re_eigenvalue[1/time]", "im_eigenvalue[1/time]"],
        [ev.real, ev.imag],
    ))
    report.add_output("spectrum_json", write_json(out / "spectrum.json", {
        "config_hash": report.config_hash,
        "abscissa": spec.abscissa,
        "abscissa_resolved_band": spec.abscissa_within(cap),
        "resolved_frequency_cap": cap,
        "axis_clearance": spec.clearance,
        "axis_count": spec.axis_count,
        "axis_tolerance": spec.axis_tol,
        "count": int(ev.size),
    }))
    if figures:
        from .figures import spectrum_figure
        report.add_output("spectrum_png", spectrum_figure(spec, out / "spectrum.png"))


def _run_sweep(cfg, out: Path, report: RunReport, figures: bool, workers: int):
    gen, form = build_system(cfg)
    sec = cfg.sweep
    result = sweep(gen, form, sec.lambda_min, sec.lambda_max, sec.points,
                   fit_band=sec.fit_band, workers=workers, seed=cfg.seed + 2024)
    static = resolvent_norm(gen, form, 0.0, seed=cfg.seed + 2024)
    uniform = uniform_bound_check(result, static_norm=static)
    gevrey = gevrey_bound_check(result)
    report.add_output("sweep_csv", write_csv(
        out / "sweep.csv",
        ["lambda[1/time]", "resolvent_norm[time]"],
        [result.lambdas, result.norms],
    ))
    report.add_output("sweep_json", write_json(out / "sweep.json", {
        "config_hash": report.config_hash,
        "gamma": result.fit.gamma,
        "prefactor": result.fit.prefactor,
        "fit_residual": result.fit.residual,
        "fit_trusted": result.fit.trusted,
        "fit_band": list(result.fit_band),
        "resolved_frequency_cap": result.resolved_cap,
        "sigma_star": gevrey.sigma_star,
        "gevrey_half_band_ratio": gevrey.ratio,
        "gevrey_bounded": gevrey.bounded,
        "uniform_sup_norm": uniform.sup_norm,
        "static_norm": static,
        "uniform_upper_trend": uniform.upper_trend,
        "uniform_bounded": uniform.bounded,
    }))
    if figures:
        from .figures import sweep_figure
        report.add_output("sweep_png", sweep_figure(result, out / "sweep.png"))


def _run_evolve(cfg, out: Path, report: RunReport, figures: bool):
    gen, form = build_system(cfg)
    sec = cfg.evolve
    Z0 = default_initial_state(gen, form, n_modes=sec.n_modes, seed=cfg.seed)
    dt = sec.dt if sec.dt > 0 else None
    trace = evolve(gen, form, Z0, T=sec.horizon, dt=dt, track_split=sec.track_split)
    columns = [trace.times, trace.energies]
    header = ["t[time]", "energy[energy]"]
    if trace.q_energies is not None:
        header += ["q_energy[energy]", "p_energy[energy]"]
        columns += [trace.q_energies, trace.p_energies]
    report.add_output("trace_csv", write_csv(out / "trace.csv", header, columns))
    payload = {
        "config_hash": report.config_hash,
        "dt": trace.dt,
        "steps": len(trace.times) - 1,
        "initial_energy": trace.energies[0],
        "final_energy": trace.energies[-1],
        "per_step_identity_residual": dissipation_identity_residual(trace),
        "telescoped_identity_residual": telescoped_residual(trace),
    }
    window = (sec.horizon / 2, sec.horizon)
    if np.all(trace.energies[trace.times >= window[0]] > 0):
        fit = fit_decay_rate(trace, window)
        payload.update({"decay_mu": fit.mu, "decay_c0": fit.c0,
                        "decay_fit_residual": fit.residual,
                        "decay_window": list(fit.window)})
    if trace.q_energies is not None:
        q = trace.q_energies
        payload["q_energy_relative_drift"] = float(np.max(np.abs(q - q[0])) / q[0]) if q[0] > 0 else 0.0
    report.add_output("trace_json", write_json(out / "trace.json", payload))
    if figures:
        from .figures import trace_figure
        report.add_output("trace_png", trace_figure(trace, out / "trace.png"))


def _run_abstract(cfg, out: Path, report: RunReport, figures: bool):
    sec = cfg.abstract
    config = AbstractConfig(a=sec.a, b=sec.b, gamma=sec.gamma)
    fits = theta_exponent_sweep(config, list(sec.thetas),
                                (sec.lambda_min, sec.lambda_max), sec.points)
    report.add_output("abstract_csv", write_csv(
        out / "abstract.csv",
        ["theta[1]", "gamma_fit[1]", "fit_residual[1]"],
        [np.array([f.theta for f in fits]),
         np.array([f.gamma for f in fits]),
         np.array([f.residual for f in fits])],
    ))
    report.add_output("abstract_json", write_json(out / "abstract.json", {
        "config_hash": report.config_hash,
        "speeds": [sec.a, sec.b],
        "coupling": sec.gamma,
        "band": [sec.lambda_min, sec.lambda_max],
        "fits": [dataclasses.asdict(f) for f in fits],
    }))
    if figures:
        from .figures import theta_figure
        report.add_output("abstract_png", theta_figure(fits, out / "abstract.png"))


def _run_validate_damping(cfg, out: Path, report: RunReport, figures: bool):
    grid = build_grid(cfg)
    profile = build_profile(cfg, grid)
    payload = {
        "config_hash": report.config_hash,
        "kind": profile.kind,
        "support": [list(pair) for pair in profile.support],
        "amplitude": profile.amplitude,
        "transition": profile.transition,
        "coercive_at_amplitude": validate_coercive(profile, grid, profile.amplitude)
        if profile.kind != "zero" else False,
    }
    try:
        structural = validate_structural(profile)
        payload["structural"] = {
            "applicable": True, "m1": structural.m1, "m2": structural.m2,
            "floor": structural.floor, "cap": structural.cap,
            "coercivity_constant": structural.coercivity_constant,
            "pass": structural.passed,
        }
    except NotApplicableError as exc:
        payload["structural"] = {"applicable": False, "reason": str(exc)}
    report.add_output("damping_json", write_json(out / "damping.json", payload))
    if figures:
        from .figures import profile_figure
        report.add_output("damping_png", profile_figure(profile, out / "damping.png"))


def _run_acceptance(cfg, out: Path, report: RunReport, figures: bool) -> bool:
    acceptance = run_all(echo=print)
    report.add_output("acceptance_json", write_json(out / "acceptance.json", {
        "config_hash": report.config_hash,
        "all_passed": acceptance.all_passed,
        "criteria": [
            {"number": r.number, "title": r.title, "passed": r.passed,
             "details": r.details, "note": r.note}
            for r in acceptance.results
        ],
    }))
    return acceptance.all_passed


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = parse_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        out = args.out
        out.mkdir(parents=True, exist_ok=True)
        report = RunReport(
            subcommand=args.subcommand,
            config=config_to_dict(cfg),
            config_hash=config_hash(cfg),
            version=__version__,
        )
        figures = _figures_enabled(cfg, args)
        start = time.perf_counter()
        ok = True
        if args.subcommand == "spectrum":
            _run_spectrum(cfg, out, report, figures)
        elif args.subcommand == "resolvent-sweep":
            _run_sweep(cfg, out, report, figures, max(1, args.threads))
        elif args.subcommand == "evolve":
            _run_evolve(cfg, out, report, figures)
        elif args.subcommand == "abstract-sweep":
            _run_abstract(cfg, out, report, figures)
        elif args.subcommand == "validate-damping":
            _run_validate_damping(cfg, out, report, figures)
        else:
            ok = _run_acceptance(cfg, out, report, figures)
        report.timings_seconds["total"] = time.perf_counter() - start
        report.write(out / "run.json")
        for name, path in sorted(report.outputs.items()):
            print(f"{name}: {path}")
        return 0 if ok else 1
    except TwinplateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
