"""Pure-NumPy trajectory kernels; fallback twin of the compiled module.

Both backends expose the same functions with the same RNG consumption
per trajectory stream: the jump route draws `rng.random(n_steps)` once,
the sampled-potential route draws `rng.standard_normal((n_steps, n))`
once.  Block functions evolve a batch of trajectories in lockstep.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateStateError, DivergenceDetectedError, StepTooCoarseError

BACKEND_NAME = "python"
MAX_JUMP_PROBABILITY = 0.1


def fft(a):
    return np.fft.fft(a)


def ifft(a):
    return np.fft.ifft(a)


def _moments_1d(psi, x, dx):
    prob = psi.real**2 + psi.imag**2
    total = prob.sum() * dx
    if not np.isfinite(total) or total <= 0.0:
        raise DivergenceDetectedError("wavefunction norm lost during trajectory")
    x_mean = (prob * x).sum() * dx / total
    d = x - x_mean
    var = (prob * d * d).sum() * dx / total
    if var < 1e-12:
        raise DegenerateStateError("trajectory state collapsed below variance 1e-12")
    third = (prob * d * d * d).sum() * dx / total
    return total, x_mean, var, third


def _moments_batch(psi, x, dx):
    prob = psi.real**2 + psi.imag**2
    total = prob.sum(axis=1) * dx
    if not np.all(np.isfinite(total)) or total.min() <= 0.0:
        raise DivergenceDetectedError("wavefunction norm lost during trajectory")
    x_mean = (prob * x[None, :]).sum(axis=1) * dx / total
    d = x[None, :] - x_mean[:, None]
    var = (prob * d * d).sum(axis=1) * dx / total
    if var.min() < 1e-12:
        raise DegenerateStateError("trajectory state collapsed below variance 1e-12")
    return total, x_mean, var, d


def _record_slots(n_steps, record_every):
    if record_every <= 0:
        return np.empty(0, dtype=np.int64)
    slots = list(range(0, n_steps, record_every))
    slots.append(n_steps)
    return np.asarray(slots, dtype=np.int64)


def jump_trajectory(psi0, x, dx, kphase, cdrift, crate, dt, uniforms, record_every=0, jumps_enabled=True):
    """One orthogonal-jump trajectory with full event and series recording.

    `uniforms` holds one draw per step and fixes the step count; set
    jumps_enabled=False for the pure nonlinear drift.  Returns
    (psi_final, integrated_rate,
     jump_steps, jump_xmean, jump_var, jump_third, jump_rates,
     rec_steps, rec_xmean, rec_var, rec_norm, rec_rate).
    """
    psi = np.array(psi0, dtype=np.complex128)
    uniforms = np.asarray(uniforms, dtype=float)
    n_steps = len(uniforms)
    jumps_enabled = jumps_enabled and crate > 0.0

    rec_steps = _record_slots(n_steps, record_every)
    rec_xmean = np.zeros(len(rec_steps))
    rec_var = np.zeros(len(rec_steps))
    rec_norm = np.zeros(len(rec_steps))
    rec_rate = np.zeros(len(rec_steps))
    rec_pos = 0

    jump_steps, jump_xmean, jump_var, jump_third, jump_rates = [], [], [], [], []
    integrated = 0.0
    half = -0.5 * cdrift * dt

    for k in range(n_steps):
        total, xm, var, third = _moments_1d(psi, x, dx)
        w = crate * var
        if rec_pos < len(rec_steps) and rec_steps[rec_pos] == k:
            rec_xmean[rec_pos] = xm
            rec_var[rec_pos] = var
            rec_norm[rec_pos] = np.sqrt(total)
            rec_rate[rec_pos] = w
            rec_pos += 1
        if w * dt > MAX_JUMP_PROBABILITY:
            raise StepTooCoarseError(
                f"w*dt = {w * dt:.4f} exceeds {MAX_JUMP_PROBABILITY} at step {k}"
            )
        integrated += w * dt
        if jumps_enabled and uniforms[k] < w * dt:
            jump_steps.append(k)
            jump_xmean.append(xm)
            jump_var.append(var)
            jump_third.append(third)
            jump_rates.append(w)
            psi = ((x - xm) / np.sqrt(var)) * psi
            total, xm, var, third = _moments_1d(psi, x, dx)
        d = x - xm
        psi = psi * np.exp(half * (d * d - var))
        psi = np.fft.ifft(kphase * np.fft.fft(psi))
        total, xm, var, third = _moments_1d(psi, x, dx)
        d = x - xm
        psi = psi * np.exp(half * (d * d - var))
        nrm2 = (psi.real**2 + psi.imag**2).sum() * dx
        if not np.isfinite(nrm2) or nrm2 <= 0.0:
            raise DivergenceDetectedError(f"norm lost at step {k}")
        psi = psi / np.sqrt(nrm2)

    if rec_pos < len(rec_steps):
        total, xm, var, third = _moments_1d(psi, x, dx)
        rec_xmean[rec_pos] = xm
        rec_var[rec_pos] = var
        rec_norm[rec_pos] = np.sqrt(total)
        rec_rate[rec_pos] = crate * var

    return (
        psi,
        integrated,
        np.asarray(jump_steps, dtype=np.int64),
        np.asarray(jump_xmean),
        np.asarray(jump_var),
        np.asarray(jump_third),
        np.asarray(jump_rates),
        rec_steps,
        rec_xmean,
        rec_var,
        rec_norm,
        rec_rate,
    )


def jump_block(psi0, x, dx, kphase, cdrift, crate, dt, n_steps, rngs, jumps_enabled=True):
    """Evolve len(rngs) jump trajectories in lockstep from a shared psi0.

    Returns (finals (B, n), n_jumps (B,), integrated_rate (B,)).
    """
    b = len(rngs)
    psi = np.tile(np.asarray(psi0, dtype=np.complex128), (b, 1))
    uniforms = np.stack([g.random(n_steps) for g in rngs]) if n_steps else np.zeros((b, 0))
    n_jumps = np.zeros(b, dtype=np.int64)
    integrated = np.zeros(b)
    half = -0.5 * cdrift * dt
    do_jumps = jumps_enabled and crate > 0.0

    for k in range(n_steps):
        total, xm, var, d = _moments_batch(psi, x, dx)
        w = crate * var
        wdt = w * dt
        if wdt.max() > MAX_JUMP_PROBABILITY:
            raise StepTooCoarseError(
                f"w*dt = {wdt.max():.4f} exceeds {MAX_JUMP_PROBABILITY} at step {k}"
            )
        integrated += wdt
        if do_jumps:
            rows = np.nonzero(uniforms[:, k] < wdt)[0]
            if rows.size:
                n_jumps[rows] += 1
                psi[rows] = (d[rows] / np.sqrt(var[rows])[:, None]) * psi[rows]
                _, xm_r, var_r, d_r = _moments_batch(psi[rows], x, dx)
                xm[rows] = xm_r
                var[rows] = var_r
                d[rows] = d_r
        psi *= np.exp(half * (d * d - var[:, None]))
        psi = np.fft.ifft(kphase[None, :] * np.fft.fft(psi, axis=1), axis=1)
        total, xm, var, d = _moments_batch(psi, x, dx)
        psi *= np.exp(half * (d * d - var[:, None]))
        nrm2 = (psi.real**2 + psi.imag**2).sum(axis=1) * dx
        if not np.all(np.isfinite(nrm2)) or nrm2.min() <= 0.0:
            raise DivergenceDetectedError(f"norm lost at step {k}")
        psi /= np.sqrt(nrm2)[:, None]

    return psi, n_jumps, integrated


def whitenoise_trajectory(psi0, x, dx, kphase_half, weights, dt_over_hbar, normals, record_every=0):
    """One Schroedinger trajectory in a freshly sampled potential per step.

    `normals` has shape (n_steps, n).  Returns
    (psi_final, rec_steps, rec_xmean, rec_var, rec_norm).
    """
    psi = np.array(psi0, dtype=np.complex128)
    normals = np.asarray(normals, dtype=float)
    n_steps = normals.shape[0]

    rec_steps = _record_slots(n_steps, record_every)
    rec_xmean = np.zeros(len(rec_steps))
    rec_var = np.zeros(len(rec_steps))
    rec_norm = np.zeros(len(rec_steps))
    rec_pos = 0

    for k in range(n_steps):
        if rec_pos < len(rec_steps) and rec_steps[rec_pos] == k:
            total, xm, var, _ = _moments_1d(psi, x, dx)
            rec_xmean[rec_pos] = xm
            rec_var[rec_pos] = var
            rec_norm[rec_pos] = np.sqrt(total)
            rec_pos += 1
        psi = np.fft.ifft(kphase_half * np.fft.fft(psi))
        v = np.fft.ifft(weights * np.fft.fft(normals[k])).real
        psi = psi * np.exp(-1j * dt_over_hbar * v)
        psi = np.fft.ifft(kphase_half * np.fft.fft(psi))

    if rec_pos < len(rec_steps):
        total, xm, var, _ = _moments_1d(psi, x, dx)
        rec_xmean[rec_pos] = xm
        rec_var[rec_pos] = var
        rec_norm[rec_pos] = np.sqrt(total)

    return psi, rec_steps, rec_xmean, rec_var, rec_norm


def whitenoise_block(psi0, x, dx, kphase_half, weights, dt_over_hbar, n_steps, rngs):
    """Lockstep batch of sampled-potential trajectories; returns finals (B, n)."""
    b = len(rngs)
    n = len(psi0)
    psi = np.tile(np.asarray(psi0, dtype=np.complex128), (b, 1))
    normals = np.stack([g.standard_normal((n_steps, n)) for g in rngs]) if n_steps else None

    for k in range(n_steps):
        psi = np.fft.ifft(kphase_half[None, :] * np.fft.fft(psi, axis=1), axis=1)
        v = np.fft.ifft(weights[None, :] * np.fft.fft(normals[:, k, :], axis=1), axis=1).real
        psi *= np.exp(-1j * dt_over_hbar * v)
        psi = np.fft.ifft(kphase_half[None, :] * np.fft.fft(psi, axis=1), axis=1)
        if not np.isfinite(psi[:, 0].real).all():
            raise DivergenceDetectedError(f"norm lost at step {k}")

    return psi
