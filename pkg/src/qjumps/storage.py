"""On-disk interchange formats.

Density matrices dump to a 16-byte header (little-endian uint64
n_points, float32 x_min, float32 x_max) followed by the kernel as
row-major complex pairs of little-endian 64-bit floats.  Box bounds are
stored as float32, so they must be float32-representable for a lossless
grid round trip.  CSV files carry fixed headers and repr-formatted
floats so identical runs produce byte-identical output.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grids import SpatialGrid, build_grid
from .states import DensityMatrix

_HEADER = struct.Struct("<Qff")


def save_density(rho: DensityMatrix, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(rho.grid.n_points, rho.grid.x_min, rho.grid.x_max))
        fh.write(np.ascontiguousarray(rho.kernel, dtype="<c16").tobytes())


def load_density(path) -> DensityMatrix:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: too short for a density dump header")
    n, x_min, x_max = _HEADER.unpack_from(raw)
    expected = _HEADER.size + 16 * n * n
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes for n={n}, found {len(raw)}")
    kernel = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).reshape(n, n)
    return DensityMatrix(build_grid(int(n), float(x_min), float(x_max)), kernel)


def save_density_abs_csv(rho: DensityMatrix, path) -> None:
    """|rho| as a plain n x n numeric CSV (no header), for plotting."""
    np.savetxt(path, np.abs(rho.kernel), delimiter=",", fmt="%.12g")


def format_float(value) -> str:
    return repr(float(value))


def write_csv(path, header: str, columns) -> None:
    """Write columns of equal length under a comma-separated header line."""
    columns = [np.atleast_1d(c) for c in columns]
    n_rows = len(columns[0])
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for i in range(n_rows):
            fh.write(",".join(format_float(col[i]) for col in columns) + "\n")


def read_csv_columns(path) -> dict[str, np.ndarray]:
    with open(path) as fh:
        names = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        return {name: np.empty(0) for name in names}
    return {name: data[:, i] for i, name in enumerate(names)}


def save_wavefunction_series(record, path) -> None:
    """Trajectory observable series in the documented column order."""
    write_csv(
        path,
        "t,norm,x_mean,x_var,rate",
        [record.times, record.norm, record.x_mean, record.variance, record.rate],
    )


def save_jump_log(record, path) -> None:
    write_csv(
        path,
        "t_jump,rate_at_jump",
        [
            np.asarray([j.time for j in record.jumps]),
            np.asarray([j.rate_at_jump for j in record.jumps]),
        ],
    )
