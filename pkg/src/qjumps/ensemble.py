"""Monte Carlo ensembles for both stochastic routes and route comparison.

Trajectory i of route r draws its own RNG stream from
SeedSequence(base_seed, spawn_key=(r, i)), so results do not depend on
how trajectories are scheduled.  Work is split into fixed chunks of 64
trajectories; chunk partial sums are folded in index order, which makes
the ensemble average bitwise reproducible for any worker count.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import backends
from .errors import GridMismatchError
from .grids import PhysicalConstants, SpatialGrid, kinetic_phase
from .noise import NoiseModel, spectral_weights
from .states import DensityMatrix, WaveFunction, expectation, hs_distance, inner_product, purity

JUMP_ROUTE = 0
WHITENOISE_ROUTE = 1
CHUNK = 64


@dataclass(frozen=True)
class MixedInitialState:
    """Orthonormal components (p_r, psi_r) with positive weights summing to 1."""

    components: tuple[tuple[float, WaveFunction], ...]

    def __post_init__(self):
        comps = tuple((float(p), psi) for p, psi in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("mixture needs at least one component")
        weights = [p for p, _ in comps]
        if min(weights) <= 0.0:
            raise ValueError(f"weights must be positive, got {weights}")
        if abs(sum(weights) - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {sum(weights)}, expected 1")
        grid = comps[0][1].grid
        for i, (_, a) in enumerate(comps):
            if a.grid != grid:
                raise GridMismatchError("mixture components live on different grids")
            for _, b in comps[i + 1 :]:
                if abs(inner_product(a, b)) > 1e-8:
                    raise ValueError("mixture components are not pairwise orthogonal")

    @classmethod
    def pure(cls, psi: WaveFunction) -> "MixedInitialState":
        return cls(((1.0, psi),))

    @property
    def grid(self) -> SpatialGrid:
        return self.components[0][1].grid


@dataclass
class EnsembleResult:
    averaged_rho: DensityMatrix
    n_trajectories: int
    mean_jump_count: float
    mean_integrated_rate: float
    digest: str
    jump_counts: np.ndarray | None = None
    integrated_rates: np.ndarray | None = None


def allocate_trajectories(weights, n_traj: int) -> list[int]:
    """Largest-remainder rounding of p_r * n_traj to integer counts."""
    weights = list(weights)
    raw = [p * n_traj for p in weights]
    counts = [int(np.floor(v)) for v in raw]
    short = n_traj - sum(counts)
    remainders = sorted(range(len(weights)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in remainders[:short]:
        counts[i] += 1
    return counts


def trajectory_rng(base_seed: int, route: int, index: int) -> np.random.Generator:
    """The stream owned by one trajectory; independent of scheduling."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(base_seed, spawn_key=(route, index)))
    )


def _restriction_stride(traj_grid: SpatialGrid, rho_grid: SpatialGrid) -> int:
    if rho_grid == traj_grid:
        return 1
    same_box = rho_grid.x_min == traj_grid.x_min and rho_grid.x_max == traj_grid.x_max
    if not same_box or traj_grid.n_points % rho_grid.n_points != 0:
        raise GridMismatchError(
            "rho grid must share the box and divide the trajectory grid size"
        )
    return traj_grid.n_points // rho_grid.n_points


def _run_chunk(job):
    """Worker: evolve one chunk of trajectories, return its partial sums."""
    (
        route,
        psi0,
        grid,
        model,
        constants,
        dt,
        n_steps,
        base_seed,
        start,
        count,
        stride,
        backend_name,
        jumps_enabled,
    ) = job
    backend = backends.get_backend(backend_name)
    rngs = [trajectory_rng(base_seed, route, start + i) for i in range(count)]
    x = grid.x
    if route == JUMP_ROUTE:
        kphase = kinetic_phase(grid, constants, dt)
        cdrift = 0.5 * model.a_squared / constants.hbar**2
        crate = model.a_squared / constants.hbar**2
        finals, n_jumps, integrated = backend.jump_block(
            psi0, x, grid.dx, kphase, cdrift, crate, dt, n_steps, rngs, jumps_enabled
        )
    else:
        kphase_half = kinetic_phase(grid, constants, 0.5 * dt)
        weights = spectral_weights(model, grid, dt)
        finals = backend.whitenoise_block(
            psi0, x, grid.dx, kphase_half, weights, dt / constants.hbar, n_steps, rngs
        )
        n_jumps = np.zeros(len(rngs), dtype=np.int64)
        integrated = np.zeros(len(rngs))

    finals = finals[:, ::stride]
    n_rho = finals.shape[1]
    partial = np.zeros((n_rho, n_rho), dtype=np.complex128)
    for row in finals:
        partial += np.outer(row, np.conj(row))
    return partial, n_jumps, integrated


def _run_ensemble(
    route: int,
    init: MixedInitialState,
    model: NoiseModel,
    constants: PhysicalConstants,
    T: float,
    dt: float,
    n_traj: int,
    base_seed: int,
    rho_grid: SpatialGrid | None,
    threads: int,
    backend_name: str | None,
    jumps_enabled: bool,
) -> EnsembleResult:
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    traj_grid = init.grid
    rho_grid = rho_grid or traj_grid
    stride = _restriction_stride(traj_grid, rho_grid)
    n_steps = int(round(T / dt))

    counts = allocate_trajectories([p for p, _ in init.components], n_traj)
    jobs = []
    offset = 0
    for (p, psi), count in zip(init.components, counts):
        for start in range(0, count, CHUNK):
            size = min(CHUNK, count - start)
            jobs.append(
                (
                    route,
                    psi.amplitudes,
                    traj_grid,
                    model,
                    constants,
                    dt,
                    n_steps,
                    base_seed,
                    offset + start,
                    size,
                    stride,
                    backend_name,
                    jumps_enabled,
                )
            )
        offset += count

    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(job) for job in jobs]

    n_rho = rho_grid.n_points
    total = np.zeros((n_rho, n_rho), dtype=np.complex128)
    all_jumps = []
    all_rates = []
    for partial, nj, ir in results:
        total += partial
        all_jumps.append(nj)
        all_rates.append(ir)
    jump_counts = np.concatenate(all_jumps)
    integrated_rates = np.concatenate(all_rates)

    rho = DensityMatrix(rho_grid, total / n_traj)
    if abs(rho.trace() - 1.0) > 1e-6:
        raise RuntimeError(f"ensemble trace {rho.trace()} deviates beyond 1e-6")
    digest = hashlib.sha256()
    digest.update(np.int64([route, n_traj, base_seed]).tobytes())
    digest.update(rho.kernel.tobytes())
    is_jump = route == JUMP_ROUTE
    return EnsembleResult(
        averaged_rho=rho,
        n_trajectories=n_traj,
        mean_jump_count=float(jump_counts.mean()) if is_jump else float("nan"),
        mean_integrated_rate=float(integrated_rates.mean()) if is_jump else float("nan"),
        digest=digest.hexdigest()[:16],
        jump_counts=jump_counts if is_jump else None,
        integrated_rates=integrated_rates if is_jump else None,
    )


def run_jump_ensemble(
    init: MixedInitialState,
    model: NoiseModel,
    constants: PhysicalConstants,
    T: float,
    dt: float,
    n_traj: int,
    base_seed: int,
    rho_grid: SpatialGrid | None = None,
    threads: int = 1,
    backend_name: str | None = None,
    jumps_enabled: bool = True,
) -> EnsembleResult:
    """Average |psi><psi| over orthogonal-jump trajectories."""
    return _run_ensemble(
        JUMP_ROUTE, init, model, constants, T, dt, n_traj, base_seed,
        rho_grid, threads, backend_name, jumps_enabled,
    )


def run_whitenoise_ensemble(
    init: MixedInitialState,
    model: NoiseModel,
    constants: PhysicalConstants,
    T: float,
    dt: float,
    n_traj: int,
    base_seed: int,
    rho_grid: SpatialGrid | None = None,
    threads: int = 1,
    backend_name: str | None = None,
) -> EnsembleResult:
    """Average |psi><psi| over Schroedinger evolutions in sampled potentials."""
    return _run_ensemble(
        WHITENOISE_ROUTE, init, model, constants, T, dt, n_traj, base_seed,
        rho_grid, threads, backend_name, True,
    )


@dataclass
class RouteComparison:
    hs_distance: float
    delta_x_mean: float
    delta_p2: float
    delta_purity: float


def _as_rho(obj) -> DensityMatrix:
    return obj.averaged_rho if isinstance(obj, EnsembleResult) else obj


def compare_routes(a, b, hbar: float = 1.0) -> RouteComparison:
    """Hilbert-Schmidt distance plus observable deltas between two routes."""
    ra, rb = _as_rho(a), _as_rho(b)
    if ra.grid != rb.grid:
        raise GridMismatchError("cannot compare density matrices on different grids")
    return RouteComparison(
        hs_distance=hs_distance(ra, rb),
        delta_x_mean=abs(
            expectation(ra, "position", hbar) - expectation(rb, "position", hbar)
        ),
        delta_p2=abs(
            expectation(ra, "momentum2", hbar) - expectation(rb, "momentum2", hbar)
        ),
        delta_purity=abs(purity(ra) - purity(rb)),
    )
