"""White-noise potential statistics: kernels f and g, sampling, validation.

The potential V(x, t) is a zero-mean Gaussian field, delta-correlated in
time with spatial covariance f(r).  On a periodic grid the infinite-line
kernel is replaced by its wrapped sum f_per, and one time step of width
dt carries a field with covariance f_per(x_i - x_j) / dt, sampled exactly
by circulant (spectral) factorization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefiniteError
from .grids import SpatialGrid

# Wrapped-kernel images are added until they fall below this fraction of f(0).
_PERIODIZATION_CUTOFF = 1e-15
_MAX_IMAGES = 64


@dataclass(frozen=True)
class CorrelationKernel:
    """Spatial covariance f(r) of the potential, even in r.

    Two forms: an analytic Gaussian bump C*exp(-r^2 / 2 ell^2), or a
    tabulated kernel interpolated linearly in |r| (zero beyond the table).
    """

    form: str
    amplitude: float = 0.0
    corr_length: float = 1.0
    table_r: np.ndarray | None = None
    table_f: np.ndarray | None = None

    @classmethod
    def gaussian(cls, amplitude: float, corr_length: float) -> "CorrelationKernel":
        if amplitude < 0.0:
            raise ValueError(f"kernel amplitude C must be >= 0, got {amplitude}")
        if corr_length <= 0.0:
            raise ValueError(f"correlation length must be > 0, got {corr_length}")
        return cls("gaussian", float(amplitude), float(corr_length))

    @classmethod
    def tabulated(cls, displacements, values) -> "CorrelationKernel":
        r = np.abs(np.asarray(displacements, dtype=float))
        f = np.asarray(values, dtype=float)
        if r.shape != f.shape or r.ndim != 1 or r.size < 2:
            raise ValueError("tabulated kernel needs two equal 1-D columns")
        order = np.argsort(r)
        r, f = r[order], f[order]
        if r[0] != 0.0:
            raise ValueError("tabulated kernel must include the r = 0 value")
        if np.any(f > f[0] + 1e-12 * max(1.0, abs(f[0]))):
            raise NotPositiveDefiniteError(
                "tabulated kernel has f(r) > f(0); g would be negative"
            )
        ker = cls("tabulated", float(f[0]), 1.0, r, f)
        r.flags.writeable = False
        f.flags.writeable = False
        return ker

    def __call__(self, r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        if self.form == "gaussian":
            return self.amplitude * np.exp(-(r**2) / (2.0 * self.corr_length**2))
        return np.interp(r, self.table_r, self.table_f, right=0.0)


@dataclass(frozen=True)
class NoiseModel:
    """Kernel f plus the derived decoherence kernel g(r) = f(0) - f(r).

    a_squared is the curvature g''(0), the only kernel property entering
    the quadratic master equation and the jump rate.
    """

    kernel: CorrelationKernel
    a_squared: float

    def f(self, r) -> np.ndarray:
        return self.kernel(r)

    def g(self, r) -> np.ndarray:
        return self.kernel(0.0) - self.kernel(r)

    @property
    def is_zero(self) -> bool:
        return self.kernel(0.0) == 0.0


def make_noise_model(kernel: CorrelationKernel) -> NoiseModel:
    """Derive g and A^2 from f.

    For the Gaussian form A^2 = C / ell^2.  For tabulated kernels the
    curvature is estimated from the smallest positive lag.  The zero
    kernel (C = 0) is accepted as the documented no-noise limit.
    """
    if kernel.form == "gaussian":
        a_squared = kernel.amplitude / kernel.corr_length**2
    else:
        r1 = kernel.table_r[kernel.table_r > 0.0]
        if r1.size == 0:
            raise ValueError("tabulated kernel has no positive lag")
        r1 = float(r1[0])
        a_squared = 2.0 * float(kernel(0.0) - kernel(r1)) / r1**2
    if a_squared < 0.0 or (a_squared == 0.0 and kernel(0.0) != 0.0):
        raise ValueError(f"kernel curvature A^2 = {a_squared} is not positive")
    return NoiseModel(kernel, float(a_squared))


def periodized_row(model: NoiseModel, grid: SpatialGrid) -> np.ndarray:
    """f_per at grid displacements j*dx, j = 0..N-1 (first circulant row).

    f_per(r) = sum_m f(r + m*L); images are added until they drop below
    1e-15 * f(0).
    """
    r = grid.dx * np.arange(grid.n_points)
    row = model.f(r).astype(float)
    f0 = float(model.f(0.0))
    if f0 == 0.0:
        return row
    for m in range(1, _MAX_IMAGES + 1):
        left = model.f(r - m * grid.length)
        right = model.f(r + m * grid.length)
        row += left + right
        if max(left.max(), right.max()) < _PERIODIZATION_CUTOFF * f0:
            break
    return row


def spectral_weights(model: NoiseModel, grid: SpatialGrid, dt: float) -> np.ndarray:
    """sqrt of the eigenvalues of the covariance circulant f_per/dt.

    These weights turn N iid standard normals z into one potential sample
    via V = Re ifft(weights * fft(z)).
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    row = periodized_row(model, grid) / dt
    lam = np.fft.fft(row)
    if np.abs(lam.imag).max() > 1e-9 * max(1.0, np.abs(lam.real).max()):
        raise NotPositiveDefiniteError("kernel spectrum is not real; f is not even")
    lam = lam.real
    top = lam.max()
    if top <= 0.0:
        return np.zeros(grid.n_points)
    if lam.min() < -1e-10 * top:
        raise NotPositiveDefiniteError(
            f"kernel spectrum has negative components (min {lam.min():.3e}, max {top:.3e})"
        )
    return np.sqrt(np.clip(lam, 0.0, None))


@dataclass(frozen=True)
class PotentialSample:
    """One realization of V(x_i) held constant over a step of width dt."""

    grid: SpatialGrid
    dt: float
    values: np.ndarray


def sample_potential(
    model: NoiseModel, grid: SpatialGrid, dt: float, rng: np.random.Generator
) -> PotentialSample:
    """Draw one potential realization with Cov[V_i V_j] = f_per(x_i - x_j)/dt.

    Consumes exactly grid.n_points standard normals from `rng`.
    """
    weights = spectral_weights(model, grid, dt)
    z = rng.standard_normal(grid.n_points)
    values = np.fft.ifft(weights * np.fft.fft(z)).real
    values.flags.writeable = False
    return PotentialSample(grid, float(dt), values)


@dataclass(frozen=True)
class GeneratorCheck:
    empirical: complex
    closed_form: float
    std_error: float
    within_four_se: bool


def check_generator_functional(
    model: NoiseModel,
    grid: SpatialGrid,
    h: np.ndarray,
    dt: float,
    n_samples: int,
    rng: np.random.Generator,
) -> GeneratorCheck:
    """Monte Carlo check of the characteristic functional of V.

    `h` has shape (n_steps, n_points).  The empirical side averages
    exp(i sum V h dx dt) over sampled potentials; the closed form is
    exp(-1/2 sum_steps h C h dx^2 dt) with C the periodized kernel matrix.
    """
    h = np.atleast_2d(np.asarray(h, dtype=float))
    if h.shape[1] != grid.n_points:
        raise ValueError(f"h has {h.shape[1]} columns, grid has {grid.n_points} nodes")
    n_steps = h.shape[0]
    dx = grid.dx

    row = periodized_row(model, grid)
    idx = (np.arange(grid.n_points)[:, None] - np.arange(grid.n_points)[None, :]) % grid.n_points
    cov = row[idx]
    quad = sum(float(h[s] @ cov @ h[s]) for s in range(n_steps))
    closed = float(np.exp(-0.5 * quad * dx * dx * dt))

    weights = spectral_weights(model, grid, dt)
    phases = np.zeros(n_samples)
    for s in range(n_steps):
        z = rng.standard_normal((n_samples, grid.n_points))
        v = np.fft.ifft(weights[None, :] * np.fft.fft(z, axis=1), axis=1).real
        phases += (v @ h[s]) * dx * dt
    samples = np.exp(1j * phases)
    empirical = complex(samples.mean())
    std_error = float(
        np.sqrt((samples.real.var(ddof=1) + samples.imag.var(ddof=1)) / n_samples)
    )
    deviation = abs(empirical - closed)
    return GeneratorCheck(empirical, closed, std_error, deviation <= 4.0 * std_error + 1e-12)
