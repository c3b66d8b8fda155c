"""Uniform periodic spatial grids and physical constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NonPowerOfTwoError


@dataclass(frozen=True)
class PhysicalConstants:
    """Natural units by default, both values configurable."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be strictly positive and finite, got {v}")


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic 1-D grid: node n_points wraps back to node 0.

    Nodes are x_i = x_min + i*dx with dx = (x_max - x_min) / n_points,
    so x_max itself is not a node (it aliases x_min).
    """

    n_points: int
    x_min: float
    x_max: float

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @cached_property
    def x(self) -> np.ndarray:
        nodes = self.x_min + self.dx * np.arange(self.n_points)
        nodes.flags.writeable = False
        return nodes

    @cached_property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in numpy FFT ordering."""
        k = 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)
        k.flags.writeable = False
        return k


def build_grid(n_points: int, x_min: float, x_max: float) -> SpatialGrid:
    """Construct a periodic grid, rejecting sizes the spectral steps cannot use."""
    if n_points < 8 or (n_points & (n_points - 1)) != 0:
        raise NonPowerOfTwoError(
            f"n_points must be a power of two >= 8, got {n_points}"
        )
    if not (x_max > x_min):
        raise ValueError(f"x_max must exceed x_min, got [{x_min}, {x_max}]")
    return SpatialGrid(int(n_points), float(x_min), float(x_max))


def kinetic_phase(grid: SpatialGrid, constants: PhysicalConstants, dt: float) -> np.ndarray:
    """Spectral factor exp(-i hbar k^2 dt / 2m) advancing free motion by dt."""
    return np.exp(-1j * constants.hbar * dt * grid.k**2 / (2.0 * constants.mass))
