"""Density-matrix evolution by Strang splitting.

Each step is decoherence half-step, full spectral kinetic step,
decoherence half-step.  Both sub-steps apply their generators exactly,
so the per-step error is the O(dt^2) commutator term alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DivergenceDetectedError
from .grids import PhysicalConstants, SpatialGrid, kinetic_phase
from .noise import NoiseModel, periodized_row
from .states import DensityMatrix, expectation, purity

MODES = ("general_kernel", "quadratic", "frozen_kinetic")


def folded_displacements(grid: SpatialGrid) -> np.ndarray:
    """x_i - y_j folded to the principal box image [-L/2, L/2)."""
    diff = grid.x[:, None] - grid.x[None, :]
    length = grid.length
    return (diff + 0.5 * length) % length - 0.5 * length


def decoherence_exponent_table(model: NoiseModel, grid: SpatialGrid, mode: str) -> np.ndarray:
    """g(x_i - y_j) for the requested kernel treatment.

    general_kernel and frozen_kinetic use the periodized kernel,
    g_per = f_per(0) - f_per(r); quadratic uses A^2 r^2 / 2 with the
    displacement folded to the principal image.
    """
    if mode == "quadratic":
        r = folded_displacements(grid)
        return 0.5 * model.a_squared * r * r
    row = periodized_row(model, grid)
    idx = (np.arange(grid.n_points)[:, None] - np.arange(grid.n_points)[None, :]) % grid.n_points
    return row[0] - row[idx]


@dataclass(frozen=True)
class MasterStepper:
    """Precomputed tables for one (grid, kernel, dt, mode) combination."""

    constants: PhysicalConstants
    model: NoiseModel
    grid: SpatialGrid
    dt: float
    mode: str = "quadratic"

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.mode not in MODES:
            raise ValueError(f"mode {self.mode!r} not in {MODES}")

    @cached_property
    def _deco_half(self) -> np.ndarray:
        g = decoherence_exponent_table(self.model, self.grid, self.mode)
        table = np.exp(-g * (0.5 * self.dt) / self.constants.hbar**2)
        table.flags.writeable = False
        return table

    @cached_property
    def _kin_phase(self) -> np.ndarray:
        phase = kinetic_phase(self.grid, self.constants, self.dt)
        phase.flags.writeable = False
        return phase


def decoherence_half_step(rho: DensityMatrix, stepper: MasterStepper) -> DensityMatrix:
    """Multiply by exp(-g(x-y) (dt/2) / hbar^2); exact, diagonal untouched."""
    return DensityMatrix(rho.grid, rho.kernel * stepper._deco_half)


def kinetic_step_rho(rho: DensityMatrix, stepper: MasterStepper) -> DensityMatrix:
    """Free evolution of both arguments for dt; unitary, exact on the grid."""
    if stepper.mode == "frozen_kinetic":
        return rho
    phase = stepper._kin_phase
    ker = np.fft.ifft(phase[:, None] * np.fft.fft(rho.kernel, axis=0), axis=0)
    ker = np.fft.ifft(np.conj(phase)[None, :] * np.fft.fft(ker, axis=1), axis=1)
    return DensityMatrix(rho.grid, ker)


def step_master(rho: DensityMatrix, stepper: MasterStepper) -> DensityMatrix:
    return decoherence_half_step(
        kinetic_step_rho(decoherence_half_step(rho, stepper), stepper), stepper
    )


@dataclass
class MasterEvolution:
    """Observable series at the recording cadence plus the final kernel."""

    times: np.ndarray
    trace: np.ndarray
    purity: np.ndarray
    x_mean: np.ndarray
    p_mean: np.ndarray
    x_var: np.ndarray
    p2: np.ndarray
    final_rho: DensityMatrix = field(repr=False)


def _observe(rho: DensityMatrix, hbar: float):
    xm = expectation(rho, "position", hbar)
    x2 = expectation(rho, "position2", hbar)
    return (
        rho.trace(),
        purity(rho),
        xm,
        expectation(rho, "momentum", hbar),
        x2 - xm * xm,
        expectation(rho, "momentum2", hbar),
    )


def evolve_master(
    rho0: DensityMatrix,
    stepper: MasterStepper,
    n_steps: int,
    record_every: int = 1,
) -> MasterEvolution:
    """Apply step_master n_steps times, recording observables on the way.

    At each recording point the state is monitored: trace drift beyond
    1e-4, any NaN, or a negative eigenvalue beyond -1e-8 of the largest
    aborts with DivergenceDetectedError.
    """
    if record_every <= 0:
        raise ValueError("record_every must be >= 1")
    slots = list(range(0, n_steps, record_every)) + [n_steps]
    hbar = stepper.constants.hbar

    rows = []
    times = []
    rho = rho0
    pos = 0
    for k in range(n_steps + 1):
        if pos < len(slots) and slots[pos] == k:
            row = _observe(rho, hbar)
            if not all(np.isfinite(row)):
                raise DivergenceDetectedError(f"NaN in observables at step {k}")
            if abs(row[0] - 1.0) > 1e-4:
                raise DivergenceDetectedError(f"trace drifted to {row[0]} at step {k}")
            if rho.min_eigenvalue_ratio() < -1e-8:
                raise DivergenceDetectedError(f"negative eigenvalue at step {k}")
            rows.append(row)
            times.append(k * stepper.dt)
            pos += 1
        if k < n_steps:
            rho = step_master(rho, stepper)

    arr = np.asarray(rows)
    return MasterEvolution(
        np.asarray(times), arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4], arr[:, 5], rho
    )
