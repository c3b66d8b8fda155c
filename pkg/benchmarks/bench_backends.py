#!/usr/bin/env python3
"""Benchmark the compiled trajectory core against the pure-NumPy fallback.

Times both backends on the two ensemble kernels (orthogonal-jump and
sampled-potential trajectories) plus a single-trajectory latency probe,
and verifies that the backends agree on the final states.

    python benchmarks/bench_backends.py [--n-traj 256] [--n-steps 400]
"""

import argparse
import time

import numpy as np

from qjumps import (
    CorrelationKernel,
    PhysicalConstants,
    available_backends,
    build_grid,
    gaussian_packet,
    get_backend,
    make_noise_model,
)
from qjumps.ensemble import trajectory_rng
from qjumps.grids import kinetic_phase
from qjumps.noise import spectral_weights

DT = 0.005


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-traj", type=int, default=256)
    parser.add_argument("--n-steps", type=int, default=400)
    parser.add_argument("--n-points", type=int, default=256)
    args = parser.parse_args()

    constants = PhysicalConstants()
    model = make_noise_model(CorrelationKernel.gaussian(1.0, 2.0))
    grid = build_grid(args.n_points, -10.0, 10.0)
    psi0 = gaussian_packet(grid, 0.0, 0.5).amplitudes
    kphase = kinetic_phase(grid, constants, DT)
    kphase_half = kinetic_phase(grid, constants, 0.5 * DT)
    weights = spectral_weights(model, grid, DT)

    names = available_backends()
    print(f"backends: {', '.join(names)}   "
          f"(n_traj={args.n_traj}, n_steps={args.n_steps}, n_points={args.n_points})")

    finals = {}
    rows = []
    for name in names:
        backend = get_backend(name)

        rngs = [trajectory_rng(1, 0, i) for i in range(args.n_traj)]
        t0 = time.perf_counter()
        jump_out = backend.jump_block(
            psi0, grid.x, grid.dx, kphase, 0.5 * model.a_squared, model.a_squared,
            DT, args.n_steps, rngs, True,
        )
        t_jump = time.perf_counter() - t0

        rngs = [trajectory_rng(1, 1, i) for i in range(args.n_traj)]
        t0 = time.perf_counter()
        wn_out = backend.whitenoise_block(
            psi0, grid.x, grid.dx, kphase_half, weights, DT, args.n_steps, rngs,
        )
        t_wn = time.perf_counter() - t0

        uniforms = trajectory_rng(2, 0, 0).random(args.n_steps)
        t0 = time.perf_counter()
        for _ in range(8):
            backend.jump_trajectory(
                psi0, grid.x, grid.dx, kphase, 0.5 * model.a_squared, model.a_squared,
                DT, uniforms, 0, True,
            )
        t_single = (time.perf_counter() - t0) / 8

        finals[name] = (jump_out[0], wn_out)
        rows.append((name, t_jump, t_wn, t_single))

    print(f"{'backend':<8} {'jump block':>14} {'whitenoise block':>18} {'single traj':>13}")
    for name, t_jump, t_wn, t_single in rows:
        print(
            f"{name:<8} {t_jump:>10.2f} s   {t_wn:>14.2f} s   {t_single * 1e3:>9.2f} ms"
        )
    if len(rows) == 2:
        base = {name: (tj, tw, ts) for name, tj, tw, ts in rows}
        cy, py = base["cython"], base["python"]
        print(
            f"speedup cython/python: jump x{py[0] / cy[0]:.2f}, "
            f"whitenoise x{py[1] / cy[1]:.2f}, single x{py[2] / cy[2]:.2f}"
        )
        dev_jump = np.abs(finals["cython"][0] - finals["python"][0]).max()
        dev_wn = np.abs(finals["cython"][1] - finals["python"][1]).max()
        print(f"agreement: max |diff| jump {dev_jump:.2e}, whitenoise {dev_wn:.2e}")
        assert dev_jump < 1e-9 and dev_wn < 1e-9, "backends disagree"


if __name__ == "__main__":
    main()
