"""Run configuration: a flat, sectioned key-value file (INI syntax).

Documented keys (defaults in parentheses):

    [constants]  hbar (1.0), mass (1.0)
    [grid]       n_points (128), x_min, x_max, n_points_trajectory (n_points)
    [noise]      form = gaussian | tabulated (gaussian); C, ell for the
                 gaussian form; table = path.csv for tabulated (two
                 columns: displacement, f); alternatively a_squared sets
                 a gaussian kernel with ell = 1 and C = a_squared
    [initial]    kind = gaussian | mixture (gaussian); center (0),
                 sigma0_sq (0.5), k0 (0); mixtures add weights and
                 levels, comma-separated Hermite levels of the base packet
    [run]        dt, T, record_every (1)
    [ensemble]   n_traj (100), base_seed (12345)
    [modes]      frozen_kinetic (false), drift_only (false),
                 kernel = quadratic | general (quadratic)
    [noise_check] n_samples (5000)
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .grids import PhysicalConstants, SpatialGrid, build_grid
from .noise import CorrelationKernel, NoiseModel, make_noise_model
from .states import WaveFunction, gaussian_packet, hermite_packet
from .ensemble import MixedInitialState


@dataclass(frozen=True)
class InitialSpec:
    kind: str
    center: float
    sigma0_sq: float
    k0: float
    weights: tuple[float, ...] = ()
    levels: tuple[int, ...] = ()


@dataclass(frozen=True)
class SimConfig:
    constants: PhysicalConstants
    grid: SpatialGrid
    trajectory_grid: SpatialGrid
    model: NoiseModel
    initial: InitialSpec
    dt: float
    T: float
    record_every: int
    n_traj: int
    base_seed: int
    frozen_kinetic: bool
    drift_only: bool
    kernel_mode: str
    noise_check_samples: int

    def initial_state(self, grid: SpatialGrid) -> WaveFunction:
        spec = self.initial
        if spec.kind != "gaussian":
            raise ConfigError("initial_state() needs kind = gaussian; use initial_mixture()")
        return gaussian_packet(grid, spec.center, spec.sigma0_sq, spec.k0)

    def initial_mixture(self, grid: SpatialGrid) -> MixedInitialState:
        spec = self.initial
        if spec.kind == "gaussian":
            return MixedInitialState.pure(self.initial_state(grid))
        states = [
            hermite_packet(grid, level, spec.center, spec.sigma0_sq, spec.k0)
            for level in spec.levels
        ]
        return MixedInitialState(tuple(zip(spec.weights, states)))

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))


def _get(parser, section, key, cast, default=None, where=None):
    where = where or f"[{section}] {key}"
    if not parser.has_option(section, key):
        if default is None:
            raise ConfigError(f"{where}: required key is missing")
        return default
    raw = parser.get(section, key)
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} ({exc})") from None


def _bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(v) for v in raw.split(","))


def _int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(v) for v in raw.split(","))


def _finite(value: float, where: str) -> float:
    if not math.isfinite(value):
        raise ConfigError(f"{where}: value must be finite, got {value}")
    return value


def load_config(path) -> SimConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    known = {"constants", "grid", "noise", "initial", "run", "ensemble", "modes", "noise_check"}
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"[{section}]: unknown section")

    hbar = _finite(_get(parser, "constants", "hbar", float, 1.0), "[constants] hbar")
    mass = _finite(_get(parser, "constants", "mass", float, 1.0), "[constants] mass")
    try:
        constants = PhysicalConstants(hbar, mass)
    except ValueError as exc:
        raise ConfigError(f"[constants]: {exc}") from None

    n_points = _get(parser, "grid", "n_points", int, 128)
    x_min = _finite(_get(parser, "grid", "x_min", float), "[grid] x_min")
    x_max = _finite(_get(parser, "grid", "x_max", float), "[grid] x_max")
    n_traj_points = _get(parser, "grid", "n_points_trajectory", int, n_points)
    try:
        grid = build_grid(n_points, x_min, x_max)
        traj_grid = build_grid(n_traj_points, x_min, x_max)
    except ValueError as exc:
        raise ConfigError(f"[grid]: {exc}") from None
    if n_traj_points % n_points != 0:
        raise ConfigError(
            "[grid] n_points_trajectory: must be a multiple of n_points "
            "so trajectory states restrict onto the density grid"
        )

    model = _load_noise(parser, path)
    initial = _load_initial(parser)

    dt = _finite(_get(parser, "run", "dt", float), "[run] dt")
    T = _finite(_get(parser, "run", "T", float), "[run] T")
    record_every = _get(parser, "run", "record_every", int, 1)
    if dt <= 0 or T < 0:
        raise ConfigError("[run]: dt must be > 0 and T >= 0")
    if record_every < 1:
        raise ConfigError("[run] record_every: must be >= 1")

    n_traj = _get(parser, "ensemble", "n_traj", int, 100)
    base_seed = _get(parser, "ensemble", "base_seed", int, 12345)
    if n_traj < 1:
        raise ConfigError("[ensemble] n_traj: must be >= 1")
    if base_seed < 0:
        raise ConfigError("[ensemble] base_seed: must be >= 0")

    frozen = _get(parser, "modes", "frozen_kinetic", _bool, False)
    drift_only = _get(parser, "modes", "drift_only", _bool, False)
    kernel_mode = _get(parser, "modes", "kernel", str, "quadratic").strip()
    if kernel_mode not in ("quadratic", "general"):
        raise ConfigError("[modes] kernel: must be quadratic or general")

    n_samples = _get(parser, "noise_check", "n_samples", int, 5000)
    if n_samples < 2:
        raise ConfigError("[noise_check] n_samples: must be >= 2")

    # Startup guard on the jump probability per step, evaluated at sigma0.
    w0 = model.a_squared * initial.sigma0_sq / constants.hbar**2
    if w0 * dt > 0.1:
        raise ConfigError(
            f"[run] dt: w*dt = {w0 * dt:.4f} at sigma0 exceeds the 0.1 guard"
        )

    return SimConfig(
        constants=constants,
        grid=grid,
        trajectory_grid=traj_grid,
        model=model,
        initial=initial,
        dt=dt,
        T=T,
        record_every=record_every,
        n_traj=n_traj,
        base_seed=base_seed,
        frozen_kinetic=frozen,
        drift_only=drift_only,
        kernel_mode=kernel_mode,
        noise_check_samples=n_samples,
    )


def _load_noise(parser, config_path: Path) -> NoiseModel:
    form = _get(parser, "noise", "form", str, "gaussian").strip()
    if parser.has_option("noise", "a_squared"):
        a_squared = _finite(_get(parser, "noise", "a_squared", float), "[noise] a_squared")
        if a_squared < 0:
            raise ConfigError("[noise] a_squared: must be >= 0")
        kernel = CorrelationKernel.gaussian(a_squared, 1.0)
    elif form == "gaussian":
        c = _finite(_get(parser, "noise", "c", float), "[noise] C")
        ell = _finite(_get(parser, "noise", "ell", float), "[noise] ell")
        try:
            kernel = CorrelationKernel.gaussian(c, ell)
        except ValueError as exc:
            raise ConfigError(f"[noise]: {exc}") from None
    elif form == "tabulated":
        table = _get(parser, "noise", "table", str)
        table_path = (config_path.parent / table).resolve()
        if not table_path.exists():
            raise ConfigError(f"[noise] table: file not found: {table_path}")
        data = np.loadtxt(table_path, delimiter=",", ndmin=2)
        if data.shape[1] != 2:
            raise ConfigError("[noise] table: expected two columns (displacement, f)")
        try:
            kernel = CorrelationKernel.tabulated(data[:, 0], data[:, 1])
        except ValueError as exc:
            raise ConfigError(f"[noise] table: {exc}") from None
    else:
        raise ConfigError(f"[noise] form: unknown form {form!r}")
    try:
        return make_noise_model(kernel)
    except ValueError as exc:
        raise ConfigError(f"[noise]: {exc}") from None


def _load_initial(parser) -> InitialSpec:
    kind = _get(parser, "initial", "kind", str, "gaussian").strip()
    center = _finite(_get(parser, "initial", "center", float, 0.0), "[initial] center")
    sigma0_sq = _finite(_get(parser, "initial", "sigma0_sq", float, 0.5), "[initial] sigma0_sq")
    k0 = _finite(_get(parser, "initial", "k0", float, 0.0), "[initial] k0")
    if sigma0_sq <= 0:
        raise ConfigError("[initial] sigma0_sq: must be > 0")
    if kind == "gaussian":
        return InitialSpec("gaussian", center, sigma0_sq, k0)
    if kind != "mixture":
        raise ConfigError(f"[initial] kind: unknown kind {kind!r}")
    weights = _get(parser, "initial", "weights", _float_list)
    levels = _get(parser, "initial", "levels", _int_list)
    if len(weights) != len(levels):
        raise ConfigError("[initial]: weights and levels must have equal length")
    if len(set(levels)) != len(levels):
        raise ConfigError("[initial] levels: must be distinct for orthogonality")
    return InitialSpec("mixture", center, sigma0_sq, k0, weights, levels)


def resolved_text(config: SimConfig, base_seed: int) -> str:
    """Render the effective configuration (defaults and overrides applied)."""
    model = config.model
    if model.kernel.form == "gaussian":
        noise_lines = [
            "form = gaussian",
            f"c = {model.kernel.amplitude!r}",
            f"ell = {model.kernel.corr_length!r}",
            f"# a_squared = {model.a_squared!r}",
        ]
    else:
        noise_lines = ["form = tabulated", f"# a_squared = {model.a_squared!r}"]
    init = config.initial
    init_lines = [
        f"kind = {init.kind}",
        f"center = {init.center!r}",
        f"sigma0_sq = {init.sigma0_sq!r}",
        f"k0 = {init.k0!r}",
    ]
    if init.kind == "mixture":
        init_lines.append("weights = " + ",".join(repr(w) for w in init.weights))
        init_lines.append("levels = " + ",".join(str(v) for v in init.levels))
    sections = [
        ("constants", [f"hbar = {config.constants.hbar!r}", f"mass = {config.constants.mass!r}"]),
        (
            "grid",
            [
                f"n_points = {config.grid.n_points}",
                f"x_min = {config.grid.x_min!r}",
                f"x_max = {config.grid.x_max!r}",
                f"n_points_trajectory = {config.trajectory_grid.n_points}",
            ],
        ),
        ("noise", noise_lines),
        ("initial", init_lines),
        (
            "run",
            [
                f"dt = {config.dt!r}",
                f"T = {config.T!r}",
                f"record_every = {config.record_every}",
            ],
        ),
        ("ensemble", [f"n_traj = {config.n_traj}", f"base_seed = {base_seed}"]),
        (
            "modes",
            [
                f"frozen_kinetic = {str(config.frozen_kinetic).lower()}",
                f"drift_only = {str(config.drift_only).lower()}",
                f"kernel = {config.kernel_mode}",
            ],
        ),
        ("noise_check", [f"n_samples = {config.noise_check_samples}"]),
    ]
    out = []
    for name, lines in sections:
        out.append(f"[{name}]")
        out.extend(lines)
        out.append("")
    return "\n".join(out)
