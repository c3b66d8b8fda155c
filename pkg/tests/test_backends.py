"""Cross-checks between the compiled core and the pure-NumPy fallback."""

import numpy as np
import pytest

from qjumps import available_backends, get_backend
from qjumps.ensemble import trajectory_rng
from qjumps.grids import kinetic_phase
from qjumps.noise import spectral_weights

needs_ext = pytest.mark.skipif(
    "cython" not in available_backends(), reason="compiled backend not built"
)

DT = 0.005
N_STEPS = 200


@pytest.fixture(scope="module")
def setup(constants, model, traj_grid):
    from qjumps import gaussian_packet

    psi0 = gaussian_packet(traj_grid, 0.0, 0.5)
    return {
        "psi0": psi0.amplitudes,
        "x": traj_grid.x,
        "dx": traj_grid.dx,
        "kphase": kinetic_phase(traj_grid, constants, DT),
        "kphase_half": kinetic_phase(traj_grid, constants, 0.5 * DT),
        "weights": spectral_weights(model, traj_grid, DT),
        "cdrift": 0.5 * model.a_squared,
        "crate": model.a_squared,
    }


@needs_ext
@pytest.mark.parametrize("n", [8, 64, 256, 1024])
def test_fft_matches_numpy(n):
    backend = get_backend("cython")
    rng = np.random.default_rng(n)
    a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    scale = np.abs(np.fft.fft(a)).max()
    assert np.abs(backend.fft(a) - np.fft.fft(a)).max() <= 1e-12 * scale
    assert np.abs(backend.ifft(a) - np.fft.ifft(a)).max() <= 1e-12
    assert np.abs(backend.ifft(backend.fft(a)) - a).max() <= 1e-12


@needs_ext
def test_jump_trajectory_agrees(setup):
    results = {}
    for name in ("cython", "python"):
        uniforms = trajectory_rng(17, 0, 0).random(N_STEPS)
        results[name] = get_backend(name).jump_trajectory(
            setup["psi0"], setup["x"], setup["dx"], setup["kphase"],
            setup["cdrift"], setup["crate"], DT, uniforms, 50, True,
        )
    cy, py = results["cython"], results["python"]
    assert np.abs(cy[0] - py[0]).max() <= 1e-9          # final state
    assert cy[1] == pytest.approx(py[1], abs=1e-9)      # integrated rate
    assert np.array_equal(cy[2], py[2])                 # jump steps
    assert np.array_equal(cy[7], py[7])                 # record steps
    assert np.abs(cy[9] - py[9]).max() <= 1e-9          # recorded variance


@needs_ext
def test_whitenoise_trajectory_agrees(setup):
    results = {}
    for name in ("cython", "python"):
        normals = trajectory_rng(18, 1, 0).standard_normal((N_STEPS, len(setup["psi0"])))
        results[name] = get_backend(name).whitenoise_trajectory(
            setup["psi0"], setup["x"], setup["dx"], setup["kphase_half"],
            setup["weights"], DT, normals, 50,
        )
    cy, py = results["cython"], results["python"]
    assert np.abs(cy[0] - py[0]).max() <= 1e-9
    assert np.abs(cy[3] - py[3]).max() <= 1e-9


@needs_ext
def test_jump_block_agrees(setup):
    finals = {}
    for name in ("cython", "python"):
        rngs = [trajectory_rng(19, 0, i) for i in range(16)]
        finals[name] = get_backend(name).jump_block(
            setup["psi0"], setup["x"], setup["dx"], setup["kphase"],
            setup["cdrift"], setup["crate"], DT, N_STEPS, rngs, True,
        )
    cy, py = finals["cython"], finals["python"]
    assert np.abs(cy[0] - py[0]).max() <= 1e-9
    assert np.array_equal(cy[1], py[1])
    assert np.abs(cy[2] - py[2]).max() <= 1e-9


@needs_ext
def test_whitenoise_block_agrees(setup):
    finals = {}
    for name in ("cython", "python"):
        rngs = [trajectory_rng(20, 1, i) for i in range(8)]
        finals[name] = get_backend(name).whitenoise_block(
            setup["psi0"], setup["x"], setup["dx"], setup["kphase_half"],
            setup["weights"], DT, N_STEPS, rngs,
        )
    assert np.abs(finals["cython"] - finals["python"]).max() <= 1e-9


def test_block_consistent_with_single_trajectories(setup):
    backend = get_backend()
    rngs = [trajectory_rng(21, 0, i) for i in range(4)]
    finals, n_jumps, integrated = backend.jump_block(
        setup["psi0"], setup["x"], setup["dx"], setup["kphase"],
        setup["cdrift"], setup["crate"], DT, N_STEPS, rngs, True,
    )
    for i in range(4):
        uniforms = trajectory_rng(21, 0, i).random(N_STEPS)
        single = backend.jump_trajectory(
            setup["psi0"], setup["x"], setup["dx"], setup["kphase"],
            setup["cdrift"], setup["crate"], DT, uniforms, 0, True,
        )
        assert np.abs(single[0] - finals[i]).max() <= 1e-9
        assert len(single[2]) == n_jumps[i]


def test_env_var_selects_backend(monkeypatch):
    monkeypatch.setenv("QJUMPS_BACKEND", "python")
    assert get_backend().BACKEND_NAME == "python"
    monkeypatch.delenv("QJUMPS_BACKEND")
    with pytest.raises(ValueError):
        get_backend("fortran")
