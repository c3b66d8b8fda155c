"""Wavefunctions, density matrices, and the observables read off them.

All quadratures are plain Riemann sums with weight dx; on the periodic
grid they are spectrally accurate for smooth decaying states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateStateError,
    GridMismatchError,
    UnknownObservableError,
    ZeroNormError,
)
from .grids import SpatialGrid

_OBSERVABLES = ("position", "position2", "momentum", "momentum2")


@dataclass(frozen=True)
class WaveFunction:
    """Complex amplitudes psi(x_i) on a grid. Treat as immutable."""

    grid: SpatialGrid
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.grid.n_points,):
            raise ValueError(
                f"amplitudes shape {amps.shape} does not match grid size {self.grid.n_points}"
            )
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx))


@dataclass(frozen=True)
class DensityMatrix:
    """Kernel rho(x_i, y_j) on a grid; trace uses the diagonal Riemann sum."""

    grid: SpatialGrid
    kernel: np.ndarray

    def __post_init__(self):
        n = self.grid.n_points
        ker = np.ascontiguousarray(self.kernel, dtype=np.complex128)
        if ker.shape != (n, n):
            raise ValueError(f"kernel shape {ker.shape}, expected ({n}, {n})")
        ker = ker.copy()
        ker.flags.writeable = False
        object.__setattr__(self, "kernel", ker)

    def trace(self) -> float:
        return float(np.real(np.trace(self.kernel)) * self.grid.dx)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.kernel - self.kernel.conj().T)))

    def min_eigenvalue_ratio(self) -> float:
        """min eig / max eig of the kernel (grid weight cancels)."""
        eigs = np.linalg.eigvalsh(0.5 * (self.kernel + self.kernel.conj().T))
        return float(eigs[0] / max(eigs[-1], np.finfo(float).tiny))

    def validate(self, check_positivity: bool = False) -> None:
        if self.hermiticity_defect() > 1e-10 * max(1.0, float(np.abs(self.kernel).max())):
            raise ValueError("density matrix is not hermitian within tolerance")
        if abs(self.trace() - 1.0) > 1e-8:
            raise ValueError(f"trace {self.trace()} deviates from 1 beyond 1e-8")
        if check_positivity and self.min_eigenvalue_ratio() < -1e-8:
            raise ValueError("density matrix has a negative eigenvalue beyond tolerance")


@dataclass(frozen=True)
class MomentSet:
    x_mean: float
    variance: float
    third_central: float


def _require_same_grid(a, b) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")


def normalize(psi: WaveFunction) -> WaveFunction:
    """Rescale to unit norm; direction unchanged."""
    nrm = psi.norm()
    if nrm < 1e-300:
        raise ZeroNormError("wavefunction norm is numerically zero")
    return WaveFunction(psi.grid, psi.amplitudes / nrm)


def inner_product(a: WaveFunction, b: WaveFunction) -> complex:
    """<a|b> = sum conj(a) b dx."""
    _require_same_grid(a, b)
    return complex(np.sum(np.conj(a.amplitudes) * b.amplitudes) * a.grid.dx)


def moments(psi: WaveFunction) -> MomentSet:
    """Mean position, variance, and third central moment of |psi|^2.

    The sums are self-normalized by the computed norm so that the jump
    map built on top of them is orthogonal to the input up to roundoff
    even when the state is only normalized to finite precision.
    """
    x = psi.grid.x
    dx = psi.grid.dx
    prob = np.abs(psi.amplitudes) ** 2
    total = float(np.sum(prob) * dx)
    if total < 1e-300:
        raise ZeroNormError("wavefunction norm is numerically zero")
    x_mean = float(np.sum(x * prob) * dx / total)
    d = x - x_mean
    variance = float(np.sum(d * d * prob) * dx / total)
    third = float(np.sum(d * d * d * prob) * dx / total)
    if variance < 1e-12:
        raise DegenerateStateError(f"variance {variance} below 1e-12")
    return MomentSet(x_mean, variance, third)


def pure_density(psi: WaveFunction) -> DensityMatrix:
    """rho(x, y) = psi(x) conj(psi(y))."""
    return DensityMatrix(psi.grid, np.outer(psi.amplitudes, np.conj(psi.amplitudes)))


def _spectral_derivative(kernel: np.ndarray, k: np.ndarray, order: int) -> np.ndarray:
    return np.fft.ifft((1j * k[:, None]) ** order * np.fft.fft(kernel, axis=0), axis=0)


def expectation(rho: DensityMatrix, observable: str, hbar: float = 1.0) -> float:
    """Expectation value of position/momentum and their squares.

    Position moments come from the diagonal; momentum moments from
    spectral x-derivatives of the kernel evaluated on the diagonal.
    """
    if observable not in _OBSERVABLES:
        raise UnknownObservableError(
            f"observable {observable!r} not in {_OBSERVABLES}"
        )
    grid = rho.grid
    dx = grid.dx
    diag = np.real(np.diagonal(rho.kernel))
    if observable == "position":
        return float(np.sum(grid.x * diag) * dx)
    if observable == "position2":
        return float(np.sum(grid.x**2 * diag) * dx)
    order = 1 if observable == "momentum" else 2
    deriv = _spectral_derivative(rho.kernel, grid.k, order)
    prefactor = -1j * hbar if order == 1 else -(hbar**2)
    value = complex(prefactor * np.sum(np.diagonal(deriv)) * dx)
    if abs(value.imag) > 1e-8 * max(1.0, abs(value.real)):
        raise ValueError(f"momentum expectation has imaginary residue {value.imag}")
    return float(value.real)


def purity(rho: DensityMatrix) -> float:
    """Tr rho^2 as the grid-weighted squared Frobenius norm of the kernel."""
    dx = rho.grid.dx
    return float(np.sum(np.abs(rho.kernel) ** 2) * dx * dx)


def hs_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Hilbert-Schmidt distance sqrt(sum |a - b|^2 dx^2)."""
    _require_same_grid(a, b)
    dx = a.grid.dx
    return float(np.sqrt(np.sum(np.abs(a.kernel - b.kernel) ** 2)) * dx)


def gaussian_packet(
    grid: SpatialGrid,
    center: float = 0.0,
    sigma_sq: float = 0.5,
    k0: float = 0.0,
) -> WaveFunction:
    """Minimum-uncertainty packet with position variance sigma_sq.

    `k0` is the carrier wavenumber, so the mean momentum is hbar*k0.
    """
    x = grid.x
    envelope = np.exp(-((x - center) ** 2) / (4.0 * sigma_sq))
    return normalize(WaveFunction(grid, envelope * np.exp(1j * k0 * x)))


def hermite_packet(
    grid: SpatialGrid,
    level: int,
    center: float = 0.0,
    sigma_sq: float = 0.5,
    k0: float = 0.0,
) -> WaveFunction:
    """Hermite excitation of the Gaussian packet; levels are orthonormal.

    Level 0 is `gaussian_packet`; level n multiplies the envelope by the
    physicists' Hermite polynomial H_n((x - center) / (sqrt(2) sigma)).
    """
    if level < 0:
        raise ValueError("Hermite level must be >= 0")
    x = grid.x
    xi = (x - center) / np.sqrt(2.0 * sigma_sq)
    coeffs = np.zeros(level + 1)
    coeffs[level] = 1.0
    poly = np.polynomial.hermite.hermval(xi, coeffs)
    envelope = poly * np.exp(-((x - center) ** 2) / (4.0 * sigma_sq))
    return normalize(WaveFunction(grid, envelope * np.exp(1j * k0 * x)))
