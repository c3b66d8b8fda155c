"""Pure-state unraveling of the quadratic master equation.

Between jumps the wavefunction follows a nonlinear drift: free motion
plus a real quadratic well centered on the state's own mean,

    dpsi/dt = i (hbar/2m) psi'' - (A^2/2 hbar^2) [(x - x_psi)^2 - sigma^2] psi,

which conserves the norm to first order because the bracket has zero
expectation in psi.  At rate w = A^2 sigma^2 / hbar^2 the state takes a
discrete jump to ((x - x_psi)/sigma) psi, exactly normalized and exactly
orthogonal to the pre-jump state.  Averaging the projectors of this
process over realizations reproduces the quadratic master equation.

`decompose_step` exposes the single-step diadic split behind that claim:
one short step of the master equation applied to a pure state equals
(1 - eps w) |dom><dom| + eps w |cont><cont| up to O(eps^2), where the
dominant branch is the drifted state and the contaminating branch is the
jump state plus an O(eps) skewness correction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import backends
from .errors import StepTooCoarseError
from .grids import PhysicalConstants, SpatialGrid, kinetic_phase
from .master import MasterStepper, step_master
from .noise import NoiseModel
from .states import (
    DensityMatrix,
    MomentSet,
    WaveFunction,
    hs_distance,
    inner_product,
    moments,
    pure_density,
)

MAX_JUMP_PROBABILITY = 0.1


@dataclass(frozen=True)
class UnravelStepper:
    """Precomputed factors for trajectory stepping on one grid."""

    constants: PhysicalConstants
    model: NoiseModel
    grid: SpatialGrid
    dt: float

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @property
    def drift_coef(self) -> float:
        return 0.5 * self.model.a_squared / self.constants.hbar**2

    @property
    def rate_coef(self) -> float:
        return self.model.a_squared / self.constants.hbar**2

    @cached_property
    def kphase(self) -> np.ndarray:
        phase = kinetic_phase(self.grid, self.constants, self.dt)
        phase.flags.writeable = False
        return phase


@dataclass(frozen=True)
class JumpEvent:
    time: float
    pre_moments: MomentSet
    rate_at_jump: float


@dataclass
class TrajectoryRecord:
    final_state: WaveFunction
    jumps: list[JumpEvent]
    times: np.ndarray
    x_mean: np.ndarray
    variance: np.ndarray
    norm: np.ndarray
    rate: np.ndarray
    integrated_rate: float


@dataclass
class DecompositionReport:
    epsilon: float
    mixing_rate: float
    dominant: WaveFunction = field(repr=False)
    contaminating: WaveFunction = field(repr=False)
    norm_dominant: float
    norm_contaminating: float
    overlap: complex
    reconstruction_error: float


def jump_rate(psi: WaveFunction, model: NoiseModel, constants: PhysicalConstants) -> float:
    """Mixing rate w = A^2 sigma_psi^2 / hbar^2."""
    return model.a_squared * moments(psi).variance / constants.hbar**2


def apply_jump(psi: WaveFunction) -> WaveFunction:
    """Orthogonal jump psi -> ((x - x_psi)/sigma_psi) psi.

    Normalization and orthogonality to the input hold by the definition
    of x_psi and sigma_psi, so no explicit renormalization is applied.
    """
    m = moments(psi)
    factor = (psi.grid.x - m.x_mean) / np.sqrt(m.variance)
    return WaveFunction(psi.grid, factor * psi.amplitudes)


def _check_step_size(w: float, dt: float) -> None:
    if w * dt > MAX_JUMP_PROBABILITY:
        raise StepTooCoarseError(
            f"w*dt = {w * dt:.4f} exceeds {MAX_JUMP_PROBABILITY}; shrink dt"
        )


def _drift(psi: WaveFunction, stepper: UnravelStepper, m) -> WaveFunction:
    x = psi.grid.x
    half = -0.5 * stepper.drift_coef * stepper.dt
    amps = psi.amplitudes * np.exp(half * ((x - m.x_mean) ** 2 - m.variance))
    amps = np.fft.ifft(stepper.kphase * np.fft.fft(amps))
    m2 = _raw_moments(amps, x, psi.grid.dx)
    amps = amps * np.exp(half * ((x - m2[0]) ** 2 - m2[1]))
    nrm = np.sqrt(np.sum(np.abs(amps) ** 2) * psi.grid.dx)
    return WaveFunction(psi.grid, amps / nrm)


def nonlinear_drift_step(psi: WaveFunction, stepper: UnravelStepper) -> WaveFunction:
    """One Strang step of the nonlinear drift, renormalized at the end.

    Moments are recomputed at each substep boundary and frozen within a
    substep: half quadratic factor, full spectral kinetic step, fresh
    moments, second half factor.
    """
    m = moments(psi)
    _check_step_size(stepper.rate_coef * m.variance, stepper.dt)
    return _drift(psi, stepper, m)


def _raw_moments(amps: np.ndarray, x: np.ndarray, dx: float):
    prob = np.abs(amps) ** 2
    total = prob.sum() * dx
    xm = float((prob * x).sum() * dx / total)
    var = float((prob * (x - xm) ** 2).sum() * dx / total)
    return xm, var


def step_trajectory(
    psi: WaveFunction, stepper: UnravelStepper, rng: np.random.Generator
) -> tuple[WaveFunction, bool]:
    """One stochastic step: maybe jump (probability w dt), then drift.

    Consumes exactly one uniform draw from `rng`.  The step-size guard
    uses the step-start rate, matching the block kernels; the drift that
    follows a jump is not re-guarded.
    """
    u = rng.random()
    w = jump_rate(psi, stepper.model, stepper.constants)
    _check_step_size(w, stepper.dt)
    jumped = u < w * stepper.dt
    if jumped:
        psi = apply_jump(psi)
    return _drift(psi, stepper, moments(psi)), bool(jumped)


def run_trajectory(
    psi0: WaveFunction,
    stepper: UnravelStepper,
    T: float,
    rng: np.random.Generator | None,
    record_every: int = 1,
    jumps_enabled: bool = True,
    backend=None,
) -> TrajectoryRecord:
    """Run round(T/dt) steps, logging jumps and an observable series.

    Consumes rng.random(n_steps) up front; rng may be None only when
    jumps are disabled.
    """
    if backend is None:
        backend = backends.get_backend()
    n_steps = int(round(T / stepper.dt))
    if jumps_enabled:
        if rng is None:
            raise ValueError("rng is required when jumps are enabled")
        uniforms = rng.random(n_steps)
    else:
        uniforms = np.zeros(n_steps)

    (
        final,
        integrated,
        jump_steps,
        jump_xmean,
        jump_var,
        jump_third,
        jump_rates,
        rec_steps,
        rec_xmean,
        rec_var,
        rec_norm,
        rec_rate,
    ) = backend.jump_trajectory(
        psi0.amplitudes,
        psi0.grid.x,
        psi0.grid.dx,
        stepper.kphase,
        stepper.drift_coef,
        stepper.rate_coef,
        stepper.dt,
        uniforms,
        record_every,
        jumps_enabled,
    )

    jumps = [
        JumpEvent(
            time=float(step * stepper.dt),
            pre_moments=MomentSet(float(xm), float(var), float(third)),
            rate_at_jump=float(rate),
        )
        for step, xm, var, third, rate in zip(
            jump_steps, jump_xmean, jump_var, jump_third, jump_rates
        )
    ]
    return TrajectoryRecord(
        final_state=WaveFunction(psi0.grid, final),
        jumps=jumps,
        times=np.asarray(rec_steps, dtype=float) * stepper.dt,
        x_mean=np.asarray(rec_xmean),
        variance=np.asarray(rec_var),
        norm=np.asarray(rec_norm),
        rate=np.asarray(rec_rate),
        integrated_rate=float(integrated),
    )


def decompose_step(
    psi: WaveFunction,
    epsilon: float,
    model: NoiseModel,
    constants: PhysicalConstants,
) -> DecompositionReport:
    """Single-step diadic decomposition versus one quadratic master step.

    Builds the dominant branch (drifted state including the -sigma^2
    counterterm and the kinetic epsilon term), the contaminating branch
    (jump state plus the epsilon * a_psi^3 skewness correction), and
    reports the Hilbert-Schmidt distance between
    (1 - eps w)|dom><dom| + eps w |cont><cont| and one master-equation
    step of |psi><psi| at dt = epsilon.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    m = moments(psi)
    w = model.a_squared * m.variance / constants.hbar**2
    if epsilon * w > 0.01:
        raise StepTooCoarseError(f"epsilon*w = {epsilon * w:.4f} exceeds 0.01")

    grid = psi.grid
    x = grid.x
    hbar = constants.hbar
    d_coef = 0.5 * model.a_squared / hbar**2
    sigma = np.sqrt(m.variance)

    lap = np.fft.ifft(-(grid.k**2) * np.fft.fft(psi.amplitudes))
    dom_amps = (
        psi.amplitudes * (1.0 - epsilon * d_coef * ((x - m.x_mean) ** 2 - m.variance))
        + 1j * (epsilon * hbar / (2.0 * constants.mass)) * lap
    )
    cont_amps = (
        (x - m.x_mean) / sigma + epsilon * d_coef * m.third_central / sigma
    ) * psi.amplitudes

    dominant = WaveFunction(grid, dom_amps)
    contaminating = WaveFunction(grid, cont_amps)

    recon = (1.0 - epsilon * w) * np.outer(dom_amps, np.conj(dom_amps)) + (
        epsilon * w
    ) * np.outer(cont_amps, np.conj(cont_amps))
    stepper = MasterStepper(constants, model, grid, epsilon, mode="quadratic")
    reference = step_master(pure_density(psi), stepper)
    error = hs_distance(DensityMatrix(grid, recon), reference)

    return DecompositionReport(
        epsilon=float(epsilon),
        mixing_rate=float(w),
        dominant=dominant,
        contaminating=contaminating,
        norm_dominant=dominant.norm(),
        norm_contaminating=contaminating.norm(),
        overlap=inner_product(dominant, contaminating),
        reconstruction_error=float(error),
    )
