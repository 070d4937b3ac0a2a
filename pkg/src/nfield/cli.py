"""Command-line entry point: subcommand dispatch, CSV and snapshot emission.

Exit status is 0 exactly when every certification the subcommand ran passed.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .config import (
    RunConfig,
    build_firing,
    build_grid,
    build_kernel,
    build_params,
    build_sim_config,
    build_weight,
    parse_config,
)
from .convolution import BENCH_ENGINES, benchmark, certify_lemma21
from .dynamics import certify_lipschitz, homogeneous_equilibrium, simulate
from .errors import NFieldError
from .grid import Field, constant_field, write_snapshot
from .kernels import verify_h4
from .randfields import compact_bump
from .weights import verify_h2

SUBCOMMANDS = ("simulate", "verify", "equilibrium", "energy", "semicontinuity", "bench")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v
                             for v in row])


def _base_state(config: RunConfig) -> float:
    firing = build_firing(config)
    kernel = build_kernel(config)
    if firing.strictly_increasing:
        return homogeneous_equilibrium(firing, kernel.l1_norm, config.model.h).u0
    return config.model.h


def _bump_initial(config: RunConfig) -> Field:
    """Deterministic start: a compactly supported bump over the resting state."""
    grid = build_grid(config)
    base = _base_state(config)
    center = tuple(0.5 * (lo + hi) for lo, hi in zip(grid.box_lo, grid.box_hi))
    bump = compact_bump(grid, center, width=1.0, amplitude=1.0)
    return Field(grid, base + bump.values)


def _diagnostics_rows(traj) -> list[list]:
    diag = traj.diagnostics
    rows = []
    for i, t in enumerate(diag.t):
        rows.append([
            float(t),
            float(diag.lp_norm[i]) if diag.lp_norm is not None else None,
            float(diag.sup_norm[i]),
            float(diag.lyapunov_G[i]) if diag.lyapunov_G is not None else None,
            float(diag.dG_dt[i]) if diag.dG_dt is not None else None,
        ])
    return rows


def _cmd_simulate(config: RunConfig, out: Path, trials: int) -> int:
    params = build_params(config)
    traj = simulate(params, build_sim_config(config), _bump_initial(config),
                    weight=build_weight(config), p=config.model.p)
    _write_csv(out / "diagnostics.csv",
               ["t", "lp_norm", "sup_norm", "lyapunov_G", "dG_dt"],
               _diagnostics_rows(traj))
    with open(out / "final.nfld", "wb") as fh:
        write_snapshot(traj.snapshots[-1], fh)
    return 0


def _cmd_verify(config: RunConfig, out: Path, trials: int) -> int:
    grid = build_grid(config)
    weight = build_weight(config)
    kernel = build_kernel(config)
    params = build_params(config)
    p = config.model.p
    sim_config = build_sim_config(config)

    checks = []
    h2 = verify_h2(weight, grid)
    checks.append(("H2_weight_domination", h2.K_observed, h2.K_claimed, h2.ok))
    h4 = verify_h4(kernel)
    checks.append(("H4_kernel_derivative", h4.S_observed, h4.bound, h4.ok))
    l21 = certify_lemma21(params.plan, weight, p, trials)
    checks.append(("Lemma21_convolution_bound", l21.max_ratio, l21.bound, l21.ok))
    lip = certify_lipschitz(params, weight, p, trials)
    checks.append(("Prop22_lipschitz", lip.max_quotient, lip.bound, lip.ok))

    R = analysis.absorbing_radius(params, weight, p)
    u0 = constant_field(grid, 10.0 * R)
    traj = simulate(params, sim_config, u0, weight=weight, p=p)
    absorbing = analysis.certify_absorbing(traj, weight, p, params)
    checks.append(("Lemma31_absorbing_ball", absorbing.max_violation, 1e-2,
                   absorbing.ok and absorbing.entry_ok))

    sample = analysis.sample_attractor(
        params, sim_config, config.analysis.n_initial,
        config.analysis.t_transient, config.analysis.t_sample, weight, p)
    linf = analysis.certify_linf_bound(sample, params)
    checks.append(("Thm41_linf_bound", linf.max_sup, linf.r, linf.ok))

    _write_csv(out / "verify_report.csv", ["check", "statistic", "bound", "pass"],
               [[name, stat, bound, ok] for name, stat, bound, ok in checks])
    for name, stat, bound, ok in checks:
        print(f"{name}: {'PASS' if ok else 'FAIL'} (statistic {stat:.6g}, bound {bound:.6g})")
    return 0 if all(ok for *_, ok in checks) else 1


def _cmd_equilibrium(config: RunConfig, out: Path, trials: int) -> int:
    firing = build_firing(config)
    kernel = build_kernel(config)
    result = homogeneous_equilibrium(firing, kernel.l1_norm, config.model.h)
    _write_csv(out / "equilibrium.csv", ["u0", "unique", "residual"],
               [[result.u0, result.unique, result.residual]])
    print(f"u0 = {result.u0!r}, unique = {result.unique}, residual = {result.residual:.3e}")
    return 0 if result.residual <= 1e-12 else 1


def _cmd_energy(config: RunConfig, out: Path, trials: int) -> int:
    params = build_params(config)
    if not params.firing.strictly_increasing:
        print("energy diagnostics need a strictly increasing firing rate", file=sys.stderr)
        return 1
    traj = simulate(params, build_sim_config(config), _bump_initial(config),
                    weight=build_weight(config), p=config.model.p)
    g = traj.diagnostics.lyapunov_G
    rows = [[float(t), float(g[i]), float(traj.diagnostics.dG_dt[i])]
            for i, t in enumerate(traj.diagnostics.t)]
    _write_csv(out / "energy.csv", ["t", "lyapunov_G", "dG_dt"], rows)
    monotone = bool(np.all(np.diff(g) <= 1e-10 * (1.0 + np.abs(g[:-1]))))
    print(f"energy decay {'PASS' if monotone else 'FAIL'} over {len(g)} records")
    return 0 if monotone else 1


def _cmd_semicontinuity(config: RunConfig, out: Path, trials: int) -> int:
    grid = build_grid(config)
    j0 = build_kernel(config)
    j1 = build_kernel(config, normalize_to=0.5 * config.kernel.normalize_l1)
    result = analysis.semicontinuity_experiment(
        j0, j1, list(config.analysis.epsilons), build_firing(config), config.model.h,
        grid, build_sim_config(config), build_weight(config), config.model.p,
        n_initial=config.analysis.n_initial,
        t_transient=config.analysis.t_transient,
        t_sample=config.analysis.t_sample,
    )
    _write_csv(out / "semicontinuity.csv",
               ["epsilon", "semidistance", "R_max", "max_sup_norm"],
               [[r.epsilon, r.semidistance, r.R_max, r.max_sup_norm] for r in result.rows])
    for row in result.rows:
        print(f"eps = {row.epsilon:g}: d = {row.semidistance:.6g}")
    print(f"uniform containment {'PASS' if result.containment_ok else 'FAIL'}")
    return 0 if result.containment_ok else 1


def _cmd_bench(config: RunConfig, out: Path, trials: int, sizes: list[int],
               engines: tuple[str, ...]) -> int:
    rows = benchmark(sizes, dim=config.space.dim, engines=engines, trials=trials)
    _write_csv(out / "bench.csv",
               ["engine", "points", "seconds_per_call", "max_abs_diff_vs_direct"],
               [[r.engine, r.points, r.seconds_per_call, r.max_abs_diff_vs_direct]
                for r in rows])
    for r in rows:
        print(f"{r.engine:>13} {r.points:>9} pts  {r.seconds_per_call * 1e3:9.3f} ms/call")
    return 0


def run(subcommand: str, config: RunConfig, out_dir, sizes: list[int] | None = None,
        trials: int | None = None, engines: tuple[str, ...] | None = None) -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trials = trials if trials is not None else 200
    if subcommand == "simulate":
        return _cmd_simulate(config, out, trials)
    if subcommand == "verify":
        return _cmd_verify(config, out, trials)
    if subcommand == "equilibrium":
        return _cmd_equilibrium(config, out, trials)
    if subcommand == "energy":
        return _cmd_energy(config, out, trials)
    if subcommand == "semicontinuity":
        return _cmd_semicontinuity(config, out, trials)
    if subcommand == "bench":
        return _cmd_bench(config, out, trials if trials is not None else 5,
                          sizes or [257, 513, 1025], engines or BENCH_ENGINES)
    raise ValueError(f"unknown subcommand {subcommand!r}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="nfield",
                                     description="nonlocal neural-field simulation "
                                                 "and certification")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None,
                       help="config file (defaults apply when omitted)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--trials", type=int, default=None,
                       help="Monte-Carlo trials for certifications / timing repeats")
        if name == "bench":
            p.add_argument("--sizes", type=str, default="257,513,1025",
                           help="comma-separated grid sizes (points per axis)")
            p.add_argument("--engine", type=str, default=None,
                           help="restrict to one engine (default: all)")
    args = parser.parse_args(argv)

    try:
        if args.config is not None:
            config = parse_config(Path(args.config).read_text())
        else:
            config = RunConfig()
        sizes = None
        engines = None
        if args.subcommand == "bench":
            sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
            if args.engine is not None:
                engines = (args.engine,)
        return run(args.subcommand, config, args.out, sizes=sizes,
                   trials=args.trials, engines=engines)
    except (NFieldError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
