"""Acceptance suite: one criterion per test, one printed line per criterion.

Run with `pytest -s tests/test_acceptance.py` to see the lines live.
Reference setup: hbar = m = 1, A = 0.5 (gaussian kernel C = 1, ell = 2),
minimum-uncertainty packet sigma0^2 = 0.5 at rest, density grid N = 128
on [-10, 10), trajectory grid N = 256, dt = 0.005, T = 2.
"""

import time

import numpy as np
import pytest

from qjumps import (
    WaveFunction,
    apply_jump,
    build_grid,
    decompose_step,
    gaussian_packet,
    hs_distance,
    inner_product,
    normalize,
    pure_density,
)
from qjumps.ensemble import MixedInitialState, run_jump_ensemble, run_whitenoise_ensemble
from qjumps.master import MasterStepper, decoherence_exponent_table, evolve_master
from qjumps.noise import check_generator_functional

from oracles import free_spreading_variance

DT = 0.005
T_FINAL = 2.0
N_STEPS = 400
BASE_SEED = 20250810
A_SQUARED = 0.25
SIGMA0_SQ = 0.5


def report(tag, ok, detail):
    print(f"\n{tag} {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"{tag}: {detail}"


@pytest.fixture(scope="module")
def rho0(packet_rho):
    return pure_density(packet_rho)


@pytest.fixture(scope="module")
def master_quadratic(constants, model, rho_grid, rho0):
    t0 = time.time()
    stepper = MasterStepper(constants, model, rho_grid, DT, "quadratic")
    evo = evolve_master(rho0, stepper, N_STEPS, 10)
    return evo, time.time() - t0


@pytest.fixture(scope="module")
def master_general_final(constants, model, rho_grid, rho0):
    stepper = MasterStepper(constants, model, rho_grid, DT, "general_kernel")
    return evolve_master(rho0, stepper, N_STEPS, N_STEPS).final_rho


@pytest.fixture(scope="module")
def jump_sweep(constants, model, rho_grid, packet_traj):
    """Jump ensembles for 5 seed groups at n_traj = 2000 and 4000."""
    init = MixedInitialState.pure(packet_traj)
    t0 = time.time()
    runs = {}
    for seed in range(BASE_SEED, BASE_SEED + 5):
        for n_traj in (2000, 4000):
            runs[(seed, n_traj)] = run_jump_ensemble(
                init, model, constants, T_FINAL, DT, n_traj, seed, rho_grid=rho_grid
            )
    return runs, time.time() - t0


@pytest.mark.slow
class TestAcceptance:
    def test_a01_momentum_diffusion(self, master_quadratic):
        evo, elapsed = master_quadratic
        slope = float(np.polyfit(evo.times, evo.p2, 1)[0])
        ok = abs(slope - A_SQUARED) <= 0.02 * A_SQUARED and elapsed < 120.0
        report(
            "A1",
            ok,
            f"<p^2> slope = {slope:.6f} (target {A_SQUARED} within 2%), runtime {elapsed:.1f} s",
        )

    def test_a02_purity_decay_onset(self, constants, model, rho_grid, rho0):
        stepper = MasterStepper(constants, model, rho_grid, DT, "quadratic")
        evo = evolve_master(rho0, stepper, 10, 1)
        slope = (evo.purity[-1] - evo.purity[0]) / (10 * DT)
        target = -2.0 * A_SQUARED * SIGMA0_SQ
        ok = abs(slope - target) <= 0.05 * abs(target)
        report("A2", ok, f"purity slope over 10 steps = {slope:.6f} (target {target} within 5%)")

    def test_a03_free_particle_control(self, constants, model_zero, rho_grid, rho0):
        stepper = MasterStepper(constants, model_zero, rho_grid, DT, "quadratic")
        evo = evolve_master(rho0, stepper, N_STEPS, 10)
        purity_dev = float(np.abs(evo.purity - 1.0).max())
        closed = free_spreading_variance(evo.times, SIGMA0_SQ)
        var_rel = float(np.abs(evo.x_var / closed - 1.0).max())
        ok = purity_dev <= 1e-9 and var_rel <= 0.005
        report(
            "A3",
            ok,
            f"max |purity-1| = {purity_dev:.2e} (<=1e-9), max Var x rel err = {var_rel:.2e} (<=0.5%)",
        )

    def test_a04_frozen_kinetic_exactness(self, constants, model, rho_grid, rho0):
        stepper = MasterStepper(constants, model, rho_grid, DT, "frozen_kinetic")
        evo = evolve_master(rho0, stepper, N_STEPS, N_STEPS)
        g = decoherence_exponent_table(model, rho_grid, "frozen_kinetic")
        expected = rho0.kernel * np.exp(-g * T_FINAL / constants.hbar**2)
        rel = float(
            (np.abs(evo.final_rho.kernel - expected) / (np.abs(expected) + 1e-300)).max()
        )
        ok = rel <= 1e-12
        report("A4", ok, f"max elementwise relative error = {rel:.2e} (<=1e-12)")

    def test_a05_unraveling_equivalence(self, jump_sweep, master_quadratic):
        runs, elapsed = jump_sweep
        reference = master_quadratic[0].final_rho
        h2 = [hs_distance(runs[(s, 2000)].averaged_rho, reference) for s in range(BASE_SEED, BASE_SEED + 5)]
        h4 = [hs_distance(runs[(s, 4000)].averaged_rho, reference) for s in range(BASE_SEED, BASE_SEED + 5)]
        improvement = float(np.mean(h2) / np.mean(h4))
        ok = max(h2) <= 0.05 and 1.2 <= improvement <= 1.7 and elapsed < 600.0
        report(
            "A5",
            ok,
            f"hs(2000) = {['%.4f' % h for h in h2]} (all <=0.05), "
            f"seed-averaged improvement x{improvement:.2f} (in [1.2, 1.7]), runtime {elapsed:.0f} s",
        )

    def test_a06_whitenoise_closure(self, constants, model, rho_grid, packet_traj, master_general_final):
        init = MixedInitialState.pure(packet_traj)
        t0 = time.time()
        result = run_whitenoise_ensemble(
            init, model, constants, T_FINAL, DT, 2000, BASE_SEED + 10, rho_grid=rho_grid
        )
        elapsed = time.time() - t0
        dist = hs_distance(result.averaged_rho, master_general_final)
        ok = dist <= 0.08 and elapsed < 600.0
        report("A6", ok, f"hs(whitenoise 2000, master) = {dist:.4f} (<=0.08), runtime {elapsed:.0f} s")

    def test_a07_jump_statistics(self, jump_sweep):
        runs, _ = jump_sweep
        result = runs[(BASE_SEED, 2000)]
        diff = result.jump_counts - result.integrated_rates
        se = float(diff.std(ddof=1) / np.sqrt(len(diff)))
        ok = abs(float(diff.mean())) <= 3.0 * se
        report(
            "A7",
            ok,
            f"mean count = {result.mean_jump_count:.4f}, mean integrated rate = "
            f"{result.mean_integrated_rate:.4f}, |diff| = {abs(diff.mean()):.5f} (<= 3 SE = {3 * se:.5f})",
        )

    def test_a08_orthogonal_jump_invariants(self, traj_grid):
        rng = np.random.default_rng(BASE_SEED)
        worst_overlap = 0.0
        worst_norm = 0.0
        for _ in range(100):
            spectrum = rng.standard_normal(traj_grid.n_points) + 1j * rng.standard_normal(
                traj_grid.n_points
            )
            spectrum *= np.exp(-traj_grid.k**2 / 30.0)
            psi = normalize(WaveFunction(traj_grid, np.fft.ifft(spectrum)))
            jumped = apply_jump(psi)
            worst_overlap = max(worst_overlap, abs(inner_product(jumped, psi)))
            worst_norm = max(worst_norm, abs(jumped.norm() - 1.0))
        ok = worst_overlap <= 1e-10 and worst_norm <= 1e-10
        report(
            "A8",
            ok,
            f"100 states: max |<jump,psi>| = {worst_overlap:.2e}, max |norm-1| = {worst_norm:.2e} (<=1e-10)",
        )

    def test_a09_diadic_decomposition(self, constants, model, packet_traj):
        epsilons = (1e-3, 5e-4, 2.5e-4)
        reports = [decompose_step(packet_traj, eps, model, constants) for eps in epsilons]
        lead = reports[0]
        errors = np.array([r.reconstruction_error for r in reports])
        order = float(np.polyfit(np.log(epsilons), np.log(errors), 1)[0])
        ok = (
            abs(lead.norm_dominant - 1.0) <= 1e-5
            and abs(lead.norm_contaminating - 1.0) <= 1e-5
            and abs(lead.overlap) <= 1e-5
            and 1.5 <= order <= 2.5
        )
        report(
            "A9",
            ok,
            f"norms = ({lead.norm_dominant:.7f}, {lead.norm_contaminating:.7f}) (1 +/- 1e-5), "
            f"|overlap| = {abs(lead.overlap):.2e} (<=1e-5), observed order = {order:.3f} (2.0 +/- 0.5)",
        )

    def test_a10_generator_functional(self, model, traj_grid):
        x = traj_grid.x
        cases = [
            ("zero", np.zeros((1, traj_grid.n_points))),
            ("spike", None),
            ("smooth", np.stack([0.4 * np.exp(-(x**2) / 8.0), -0.25 * np.exp(-((x - 1.0) ** 2) / 4.5)])),
        ]
        spike = np.zeros((1, traj_grid.n_points))
        spike[0, traj_grid.n_points // 2] = 1.0 / traj_grid.dx
        cases[1] = ("spike", spike)
        details = []
        ok = True
        for index, (name, h) in enumerate(cases):
            rng = np.random.Generator(
                np.random.Philox(np.random.SeedSequence(BASE_SEED, spawn_key=(2, index)))
            )
            check = check_generator_functional(model, traj_grid, h, 0.01, 5000, rng)
            ok = ok and check.within_four_se
            details.append(f"{name}: |dev| = {abs(check.empirical - check.closed_form):.4f} "
                           f"(4 SE = {4 * check.std_error:.4f})")
        report("A10", ok, "; ".join(details))

    def test_a11_strang_convergence(self, constants, model, rho_grid, rho0):
        T = 1.0
        finals = {}
        for dt in (0.05, 0.025, 0.00625):
            stepper = MasterStepper(constants, model, rho_grid, dt, "quadratic")
            n = int(round(T / dt))
            finals[dt] = evolve_master(rho0, stepper, n, n).final_rho
        e_coarse = hs_distance(finals[0.05], finals[0.00625])
        e_fine = hs_distance(finals[0.025], finals[0.00625])
        ratio = e_coarse / e_fine
        ok = 3.0 <= ratio <= 5.0
        report("A11", ok, f"error ratio dt vs dt/2 = {ratio:.2f} (in [3, 5])")
