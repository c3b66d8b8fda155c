"""Batch front-end: qjumps {master,jumps,noise-check,compare,decompose-check}.

Every subcommand is a pure function of (config file, seed): identical
inputs produce byte-identical files under --out-dir.  Exit codes:
0 success, 1 validation error, 2 tolerance failure, 3 numerical
divergence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import ensemble as ens
from . import master as ms
from . import storage, unravel
from .config import SimConfig, load_config, resolved_text
from .errors import ConfigError, DivergenceDetectedError, QjumpsError
from .states import DensityMatrix, pure_density
from .noise import check_generator_functional

JUMP_TOLERANCE = 0.05
WHITENOISE_TOLERANCE = 0.08
DECOMPOSE_EPSILONS = (1e-3, 5e-4, 2.5e-4)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to the run configuration file")
    common.add_argument("--out-dir", required=True, help="directory for all outputs")
    common.add_argument("--seed", type=int, default=None, help="override [ensemble] base_seed")
    common.add_argument(
        "--threads", type=int, default=1,
        help="worker hint for ensembles; results are identical for any value",
    )
    parser = argparse.ArgumentParser(prog="qjumps", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("master", parents=[common], help="evolve the density matrix")
    sub.add_parser("jumps", parents=[common], help="run the orthogonal-jump ensemble")
    sub.add_parser("noise-check", parents=[common], help="validate the potential sampler")
    sub.add_parser("compare", parents=[common], help="run all three routes and compare")
    sub.add_parser("decompose-check", parents=[common], help="single-step diadic decomposition")
    return parser


def _write_manifest(out_dir: Path, files: list[str], config: SimConfig, seed: int) -> None:
    lines = ["# files"] + files + ["", "# resolved config", resolved_text(config, seed)]
    (out_dir / "manifest.txt").write_text("\n".join(lines))


def _master_mode(config: SimConfig) -> str:
    if config.frozen_kinetic:
        return "frozen_kinetic"
    return "quadratic" if config.kernel_mode == "quadratic" else "general_kernel"


def _initial_rho(config: SimConfig) -> DensityMatrix:
    mixture = config.initial_mixture(config.grid)
    kernel = sum(
        p * pure_density(psi).kernel for p, psi in mixture.components
    )
    return DensityMatrix(config.grid, kernel)


def _cmd_master(config: SimConfig, out_dir: Path, seed: int, threads: int) -> int:
    stepper = ms.MasterStepper(
        config.constants, config.model, config.grid, config.dt, _master_mode(config)
    )
    evo = ms.evolve_master(_initial_rho(config), stepper, config.n_steps, config.record_every)
    storage.write_csv(
        out_dir / "master_observables.csv",
        "t,trace,purity,x_mean,p_mean,x_var,p2",
        [evo.times, evo.trace, evo.purity, evo.x_mean, evo.p_mean, evo.x_var, evo.p2],
    )
    storage.save_density(evo.final_rho, out_dir / "rho_final.bin")
    storage.save_density_abs_csv(evo.final_rho, out_dir / "rho_final_abs.csv")
    _write_manifest(
        out_dir, ["master_observables.csv", "rho_final.bin", "rho_final_abs.csv"], config, seed
    )
    return 0


def _cmd_jumps(config: SimConfig, out_dir: Path, seed: int, threads: int) -> int:
    mixture = config.initial_mixture(config.trajectory_grid)
    result = ens.run_jump_ensemble(
        mixture,
        config.model,
        config.constants,
        config.T,
        config.dt,
        config.n_traj,
        seed,
        rho_grid=config.grid,
        threads=threads,
        jumps_enabled=not config.drift_only,
    )
    storage.save_density(result.averaged_rho, out_dir / "ensemble_rho.bin")
    storage.write_csv(
        out_dir / "jump_stats.csv",
        "n_traj,mean_jump_count,mean_integrated_rate,hs_to_reference",
        [
            [result.n_trajectories],
            [result.mean_jump_count],
            [result.mean_integrated_rate],
            [float("nan")],
        ],
    )
    files = ["ensemble_rho.bin", "jump_stats.csv"]

    # Sample logs for the first trajectories, replayed on their own streams.
    counts = ens.allocate_trajectories([p for p, _ in mixture.components], config.n_traj)
    stepper = unravel.UnravelStepper(
        config.constants, config.model, config.trajectory_grid, config.dt
    )
    component_of = np.repeat(np.arange(len(counts)), counts)
    for i in range(min(10, config.n_traj)):
        psi0 = mixture.components[int(component_of[i])][1]
        rng = None if config.drift_only else ens.trajectory_rng(seed, ens.JUMP_ROUTE, i)
        record = unravel.run_trajectory(
            psi0, stepper, config.T, rng, config.record_every,
            jumps_enabled=not config.drift_only,
        )
        series = f"traj_{i:04d}_series.csv"
        jumps = f"traj_{i:04d}_jumps.csv"
        storage.save_wavefunction_series(record, out_dir / series)
        storage.save_jump_log(record, out_dir / jumps)
        files += [series, jumps]

    _write_manifest(out_dir, files, config, seed)
    return 0


def _builtin_test_functions(config: SimConfig):
    grid = config.trajectory_grid
    x = grid.x
    zero = np.zeros((1, grid.n_points))
    spike = np.zeros((1, grid.n_points))
    spike[0, grid.n_points // 2] = 1.0 / grid.dx  # integrated weight 1
    smooth = np.stack(
        [0.4 * np.exp(-(x**2) / 8.0), -0.25 * np.exp(-((x - 1.0) ** 2) / 4.5)]
    )
    return [("zero", zero), ("spike", spike), ("smooth", smooth)]


def _cmd_noise_check(config: SimConfig, out_dir: Path, seed: int, threads: int) -> int:
    rows = []
    for index, (name, h) in enumerate(_builtin_test_functions(config)):
        rng = ens.trajectory_rng(seed, 2, index)
        check = check_generator_functional(
            config.model, config.trajectory_grid, h, config.dt,
            config.noise_check_samples, rng,
        )
        rows.append((name, check))
    with open(out_dir / "generator_check.csv", "w") as fh:
        fh.write("case,empirical_re,empirical_im,closed_form,std_error,abs_deviation,within_4se\n")
        for name, check in rows:
            deviation = abs(check.empirical - check.closed_form)
            fh.write(
                ",".join(
                    [
                        name,
                        storage.format_float(check.empirical.real),
                        storage.format_float(check.empirical.imag),
                        storage.format_float(check.closed_form),
                        storage.format_float(check.std_error),
                        storage.format_float(deviation),
                        str(int(check.within_four_se)),
                    ]
                )
                + "\n"
            )
    _write_manifest(out_dir, ["generator_check.csv"], config, seed)
    return 0


def _cmd_compare(config: SimConfig, out_dir: Path, seed: int, threads: int) -> int:
    if config.frozen_kinetic or config.drift_only:
        raise ConfigError("compare requires frozen_kinetic = false and drift_only = false")
    rho0 = _initial_rho(config)
    routes = {}
    for mode, label in (("quadratic", "master_quadratic"), ("general_kernel", "master_general")):
        stepper = ms.MasterStepper(config.constants, config.model, config.grid, config.dt, mode)
        routes[label] = ms.evolve_master(
            rho0, stepper, config.n_steps, max(config.n_steps, 1)
        ).final_rho

    mixture = config.initial_mixture(config.trajectory_grid)
    routes["jump"] = ens.run_jump_ensemble(
        mixture, config.model, config.constants, config.T, config.dt,
        config.n_traj, seed, rho_grid=config.grid, threads=threads,
    ).averaged_rho
    routes["whitenoise"] = ens.run_whitenoise_ensemble(
        mixture, config.model, config.constants, config.T, config.dt,
        config.n_traj, seed, rho_grid=config.grid, threads=threads,
    ).averaged_rho

    pairs = [
        ("jump_vs_master_quadratic", "jump", "master_quadratic", JUMP_TOLERANCE),
        ("whitenoise_vs_master_general", "whitenoise", "master_general", WHITENOISE_TOLERANCE),
        ("master_quadratic_vs_master_general", "master_quadratic", "master_general", None),
        ("jump_vs_whitenoise", "jump", "whitenoise", None),
    ]
    failed = False
    files = []
    with open(out_dir / "compare_report.csv", "w") as fh:
        fh.write("pair,hs_distance,delta_x_mean,delta_p2,delta_purity,tolerance,status\n")
        for name, a, b, tolerance in pairs:
            cmp = ens.compare_routes(routes[a], routes[b], config.constants.hbar)
            if tolerance is None:
                status = "info"
            elif cmp.hs_distance <= tolerance:
                status = "pass"
            else:
                status = "fail"
                failed = True
            fh.write(
                ",".join(
                    [
                        name,
                        storage.format_float(cmp.hs_distance),
                        storage.format_float(cmp.delta_x_mean),
                        storage.format_float(cmp.delta_p2),
                        storage.format_float(cmp.delta_purity),
                        "" if tolerance is None else storage.format_float(tolerance),
                        status,
                    ]
                )
                + "\n"
            )
    files.append("compare_report.csv")
    for label, rho in routes.items():
        fname = f"rho_{label}.bin"
        storage.save_density(rho, out_dir / fname)
        files.append(fname)
    _write_manifest(out_dir, files, config, seed)
    return 2 if failed else 0


def _cmd_decompose_check(config: SimConfig, out_dir: Path, seed: int, threads: int) -> int:
    if config.initial.kind != "gaussian":
        raise ConfigError("decompose-check needs [initial] kind = gaussian")
    psi = config.initial_state(config.trajectory_grid)
    reports = [
        unravel.decompose_step(psi, eps, config.model, config.constants)
        for eps in DECOMPOSE_EPSILONS
    ]
    errors = np.array([r.reconstruction_error for r in reports])
    epsilons = np.array(DECOMPOSE_EPSILONS)
    order = float(np.polyfit(np.log(epsilons), np.log(errors), 1)[0])

    with open(out_dir / "decompose_check.csv", "w") as fh:
        fh.write(
            "epsilon,mixing_rate,norm_dominant,norm_contaminating,"
            "abs_overlap,reconstruction_error,order_vs_prev\n"
        )
        for i, r in enumerate(reports):
            step_order = (
                float("nan")
                if i == 0
                else float(
                    np.log(errors[i - 1] / errors[i]) / np.log(epsilons[i - 1] / epsilons[i])
                )
            )
            fh.write(
                ",".join(
                    storage.format_float(v)
                    for v in [
                        r.epsilon,
                        r.mixing_rate,
                        r.norm_dominant,
                        r.norm_contaminating,
                        abs(r.overlap),
                        r.reconstruction_error,
                        step_order,
                    ]
                )
                + "\n"
            )
        fh.write(f"# observed_order = {storage.format_float(order)}\n")
    _write_manifest(out_dir, ["decompose_check.csv"], config, seed)

    lead = reports[0]
    ok = (
        abs(lead.norm_dominant - 1.0) <= 1e-5
        and abs(lead.norm_contaminating - 1.0) <= 1e-5
        and abs(lead.overlap) <= 1e-5
        and 1.5 <= order <= 2.5
    )
    return 0 if ok else 2


_COMMANDS = {
    "master": _cmd_master,
    "jumps": _cmd_jumps,
    "noise-check": _cmd_noise_check,
    "compare": _cmd_compare,
    "decompose-check": _cmd_decompose_check,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = load_config(args.config)
        seed = config.base_seed if args.seed is None else args.seed
        if seed < 0:
            raise ConfigError("--seed must be >= 0")
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](config, out_dir, seed, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DivergenceDetectedError as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return 3
    except QjumpsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
