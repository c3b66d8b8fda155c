# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled trajectory kernels; twin of qjumps._kernels_py.

Same functions, same RNG consumption per trajectory stream.  The FFT is
an iterative radix-2 transform with per-stage twiddle tables, valid for
the power-of-two grids the package requires; it matches numpy's sign
and scaling conventions.  Hot loops run on raw (re, im) pairs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, isfinite, sin, sqrt

from .errors import DegenerateStateError, DivergenceDetectedError, StepTooCoarseError

cnp.import_array()

BACKEND_NAME = "cython"
MAX_JUMP_PROBABILITY = 0.1

_PLANS = {}


cdef class _Plan:
    cdef Py_ssize_t n
    cdef Py_ssize_t[::1] rev
    cdef double[::1] tw  # per-stage (re, im) pairs, stage with half=h at offset 2(h-1)

    def __cinit__(self, Py_ssize_t n):
        cdef Py_ssize_t i
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError(f"FFT size must be a power of two >= 2, got {n}")
        self.n = n
        rev = np.zeros(n, dtype=np.intp)
        self.rev = rev
        for i in range(1, n):
            self.rev[i] = (self.rev[i >> 1] >> 1) | ((i & 1) * (n >> 1))
        parts = []
        half = 1
        while half < n:
            angles = -np.pi * np.arange(half) / half
            stage = np.empty(2 * half)
            stage[0::2] = np.cos(angles)
            stage[1::2] = np.sin(angles)
            parts.append(stage)
            half <<= 1
        tw = np.concatenate(parts) if parts else np.empty(0)
        self.tw = tw


cdef _Plan _get_plan(Py_ssize_t n):
    plan = _PLANS.get(n)
    if plan is None:
        plan = _Plan(n)
        _PLANS[n] = plan
    return plan


cdef void _fft_ptr(double* a, Py_ssize_t n, const Py_ssize_t* rev,
                   const double* tw, double wi_sign, bint scale) noexcept:
    """In-place FFT on n (re, im) pairs; wi_sign=+1 forward, -1 inverse."""
    cdef Py_ssize_t i, j, k, start, half, p, q, tbase
    cdef double ur, ui, vr, vi, wr, wi, inv
    for i in range(n):
        j = rev[i]
        if i < j:
            ur = a[2 * i]
            ui = a[2 * i + 1]
            a[2 * i] = a[2 * j]
            a[2 * i + 1] = a[2 * j + 1]
            a[2 * j] = ur
            a[2 * j + 1] = ui
    half = 1
    while half < n:
        tbase = 2 * (half - 1)
        for start in range(0, n, 2 * half):
            for k in range(half):
                wr = tw[tbase + 2 * k]
                wi = wi_sign * tw[tbase + 2 * k + 1]
                q = 2 * (start + k + half)
                p = 2 * (start + k)
                vr = a[q] * wr - a[q + 1] * wi
                vi = a[q] * wi + a[q + 1] * wr
                ur = a[p]
                ui = a[p + 1]
                a[p] = ur + vr
                a[p + 1] = ui + vi
                a[q] = ur - vr
                a[q + 1] = ui - vi
        half <<= 1
    if scale:
        inv = 1.0 / n
        for i in range(2 * n):
            a[i] *= inv


cdef inline void _fft_inplace(double complex[::1] a, _Plan plan, bint inverse) noexcept:
    _fft_ptr(
        <double*> &a[0], plan.n, &plan.rev[0], &plan.tw[0],
        -1.0 if inverse else 1.0, inverse,
    )


def fft(a):
    out = np.array(a, dtype=np.complex128)
    _fft_inplace(out, _get_plan(len(out)), 0)
    return out


def ifft(a):
    out = np.array(a, dtype=np.complex128)
    _fft_inplace(out, _get_plan(len(out)), 1)
    return out


cdef int _moments_ptr(const double* a, const double* x, double dx, Py_ssize_t n,
                      double* total, double* x_mean, double* var, double* third) noexcept:
    """Self-normalized moments; returns 0 ok, 1 norm lost, 2 degenerate."""
    cdef Py_ssize_t i
    cdef double p, s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0, d, xm
    for i in range(n):
        p = a[2 * i] * a[2 * i] + a[2 * i + 1] * a[2 * i + 1]
        s0 += p
        s1 += p * x[i]
    s0 *= dx
    s1 *= dx
    if not isfinite(s0) or s0 <= 0.0:
        return 1
    xm = s1 / s0
    for i in range(n):
        p = a[2 * i] * a[2 * i] + a[2 * i + 1] * a[2 * i + 1]
        d = x[i] - xm
        s2 += p * d * d
        s3 += p * d * d * d
    s2 = s2 * dx / s0
    s3 = s3 * dx / s0
    total[0] = s0
    x_mean[0] = xm
    var[0] = s2
    third[0] = s3
    if s2 < 1e-12:
        return 2
    return 0


cdef inline void _raise_moments(int status, Py_ssize_t step):
    if status == 1:
        raise DivergenceDetectedError(f"wavefunction norm lost at step {step}")
    if status == 2:
        raise DegenerateStateError("trajectory state collapsed below variance 1e-12")


cdef inline void _complex_mul_ptr(double* a, const double* f, Py_ssize_t n) noexcept:
    """a[i] *= f[i] on (re, im) pairs."""
    cdef Py_ssize_t i
    cdef double ar, ai
    for i in range(n):
        ar = a[2 * i]
        ai = a[2 * i + 1]
        a[2 * i] = ar * f[2 * i] - ai * f[2 * i + 1]
        a[2 * i + 1] = ar * f[2 * i + 1] + ai * f[2 * i]


cdef int _drift_and_kinetic(double* a, const double* x, double dx,
                            const double* kphase, double half_coef,
                            double xm, double var, _Plan plan) noexcept:
    """Half drift factor, full kinetic step, fresh moments, second half,
    renormalize.  Returns the _moments status (0 ok)."""
    cdef Py_ssize_t i, n = plan.n
    cdef double d, f, total, var2, xm2, third, nrm2, scale
    cdef int status
    for i in range(n):
        d = x[i] - xm
        f = exp(half_coef * (d * d - var))
        a[2 * i] *= f
        a[2 * i + 1] *= f
    _fft_ptr(a, n, &plan.rev[0], &plan.tw[0], 1.0, 0)
    _complex_mul_ptr(a, kphase, n)
    _fft_ptr(a, n, &plan.rev[0], &plan.tw[0], -1.0, 1)
    status = _moments_ptr(a, x, dx, n, &total, &xm2, &var2, &third)
    if status != 0:
        return status
    nrm2 = 0.0
    for i in range(n):
        d = x[i] - xm2
        f = exp(half_coef * (d * d - var2))
        a[2 * i] *= f
        a[2 * i + 1] *= f
        nrm2 += a[2 * i] * a[2 * i] + a[2 * i + 1] * a[2 * i + 1]
    nrm2 *= dx
    if not isfinite(nrm2) or nrm2 <= 0.0:
        return 1
    scale = 1.0 / sqrt(nrm2)
    for i in range(2 * n):
        a[i] *= scale
    return 0


def jump_trajectory(psi0, x, dx, kphase, cdrift, crate, dt, uniforms,
                    record_every=0, jumps_enabled=True):
    """See qjumps._kernels_py.jump_trajectory."""
    psi_arr = np.array(psi0, dtype=np.complex128)
    cdef double complex[::1] psi_mv = psi_arr
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    kph_arr = np.ascontiguousarray(kphase, dtype=np.complex128)
    cdef const double complex[::1] kph_mv = kph_arr
    cdef const double[::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t n = psi_mv.shape[0]
    cdef Py_ssize_t n_steps = u.shape[0]
    cdef _Plan plan = _get_plan(n)
    cdef double* a = <double*> &psi_mv[0]
    cdef const double* xp = &xv[0]
    cdef const double* kp = <const double*> &kph_mv[0]
    cdef double dxc = dx, cratec = crate, dtc = dt
    cdef double half_coef = -0.5 * <double> cdrift * dtc
    cdef bint do_jumps = bool(jumps_enabled) and cratec > 0.0
    cdef Py_ssize_t rec_every = record_every

    cdef Py_ssize_t n_rec = 0
    if rec_every > 0:
        n_rec = (n_steps + rec_every - 1) // rec_every + 1
    rec_steps = np.zeros(n_rec, dtype=np.int64)
    rec_xmean = np.zeros(n_rec)
    rec_var = np.zeros(n_rec)
    rec_norm = np.zeros(n_rec)
    rec_rate = np.zeros(n_rec)
    cdef cnp.int64_t[::1] rsv = rec_steps
    cdef double[::1] rxv = rec_xmean
    cdef double[::1] rvv = rec_var
    cdef double[::1] rnv = rec_norm
    cdef double[::1] rrv = rec_rate
    cdef Py_ssize_t rec_pos = 0

    jump_steps, jump_xmean, jump_var, jump_third, jump_rates = [], [], [], [], []
    cdef double integrated = 0.0
    cdef Py_ssize_t k, i
    cdef double total, xm, var, third, w, sig
    cdef int status

    for k in range(n_steps):
        status = _moments_ptr(a, xp, dxc, n, &total, &xm, &var, &third)
        _raise_moments(status, k)
        w = cratec * var
        if rec_every > 0 and k % rec_every == 0:
            rsv[rec_pos] = k
            rxv[rec_pos] = xm
            rvv[rec_pos] = var
            rnv[rec_pos] = sqrt(total)
            rrv[rec_pos] = w
            rec_pos += 1
        if w * dtc > MAX_JUMP_PROBABILITY:
            raise StepTooCoarseError(
                f"w*dt = {w * dtc:.4f} exceeds {MAX_JUMP_PROBABILITY} at step {k}"
            )
        integrated += w * dtc
        if do_jumps and u[k] < w * dtc:
            jump_steps.append(k)
            jump_xmean.append(xm)
            jump_var.append(var)
            jump_third.append(third)
            jump_rates.append(w)
            sig = sqrt(var)
            for i in range(n):
                a[2 * i] *= (xp[i] - xm) / sig
                a[2 * i + 1] *= (xp[i] - xm) / sig
            status = _moments_ptr(a, xp, dxc, n, &total, &xm, &var, &third)
            _raise_moments(status, k)
        status = _drift_and_kinetic(a, xp, dxc, kp, half_coef, xm, var, plan)
        _raise_moments(status, k)

    if rec_every > 0:
        status = _moments_ptr(a, xp, dxc, n, &total, &xm, &var, &third)
        _raise_moments(status, n_steps)
        rsv[rec_pos] = n_steps
        rxv[rec_pos] = xm
        rvv[rec_pos] = var
        rnv[rec_pos] = sqrt(total)
        rrv[rec_pos] = cratec * var

    return (
        psi_arr,
        integrated,
        np.asarray(jump_steps, dtype=np.int64),
        np.asarray(jump_xmean, dtype=np.float64),
        np.asarray(jump_var, dtype=np.float64),
        np.asarray(jump_third, dtype=np.float64),
        np.asarray(jump_rates, dtype=np.float64),
        rec_steps,
        rec_xmean,
        rec_var,
        rec_norm,
        rec_rate,
    )


def jump_block(psi0, x, dx, kphase, cdrift, crate, dt, n_steps, rngs, jumps_enabled=True):
    """See qjumps._kernels_py.jump_block."""
    cdef Py_ssize_t b = len(rngs)
    cdef Py_ssize_t n = len(psi0)
    psi0_arr = np.ascontiguousarray(psi0, dtype=np.complex128)
    finals = np.empty((b, n), dtype=np.complex128)
    n_jumps = np.zeros(b, dtype=np.int64)
    integrated = np.zeros(b)
    cdef double complex[:, ::1] fin = finals
    cdef cnp.int64_t[::1] njv = n_jumps
    cdef double[::1] intv = integrated
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    kph_arr = np.ascontiguousarray(kphase, dtype=np.complex128)
    cdef const double complex[::1] kph_mv = kph_arr
    cdef _Plan plan = _get_plan(n)
    cdef const double* xp = &xv[0]
    cdef const double* kp = <const double*> &kph_mv[0]
    cdef double dxc = dx, cratec = crate, dtc = dt
    cdef double half_coef = -0.5 * <double> cdrift * dtc
    cdef bint do_jumps = bool(jumps_enabled) and cratec > 0.0
    cdef Py_ssize_t steps = n_steps

    cdef double complex[::1] psi_mv
    cdef const double[::1] u
    cdef double* a
    cdef Py_ssize_t t, k, i
    cdef double total, xm, var, third, w, sig, acc
    cdef cnp.int64_t count
    cdef int status

    for t in range(b):
        work = psi0_arr.copy()
        psi_mv = work
        a = <double*> &psi_mv[0]
        u = np.ascontiguousarray(rngs[t].random(steps), dtype=np.float64)
        acc = 0.0
        count = 0
        for k in range(steps):
            status = _moments_ptr(a, xp, dxc, n, &total, &xm, &var, &third)
            _raise_moments(status, k)
            w = cratec * var
            if w * dtc > MAX_JUMP_PROBABILITY:
                raise StepTooCoarseError(
                    f"w*dt = {w * dtc:.4f} exceeds {MAX_JUMP_PROBABILITY} at step {k}"
                )
            acc += w * dtc
            if do_jumps and u[k] < w * dtc:
                count += 1
                sig = sqrt(var)
                for i in range(n):
                    a[2 * i] *= (xp[i] - xm) / sig
                    a[2 * i + 1] *= (xp[i] - xm) / sig
                status = _moments_ptr(a, xp, dxc, n, &total, &xm, &var, &third)
                _raise_moments(status, k)
            status = _drift_and_kinetic(a, xp, dxc, kp, half_coef, xm, var, plan)
            _raise_moments(status, k)
        for i in range(n):
            fin[t, i] = psi_mv[i]
        njv[t] = count
        intv[t] = acc

    return finals, n_jumps, integrated


cdef void _potential_phase(double* a, const double* z, const double* weights,
                           double dt_over_hbar, double* buf, _Plan plan) noexcept:
    """a *= exp(-i dt/hbar * V) with V = Re ifft(weights * fft(z))."""
    cdef Py_ssize_t i, n = plan.n
    cdef double v, c, s, ar, ai
    for i in range(n):
        buf[2 * i] = z[i]
        buf[2 * i + 1] = 0.0
    _fft_ptr(buf, n, &plan.rev[0], &plan.tw[0], 1.0, 0)
    for i in range(n):
        buf[2 * i] *= weights[i]
        buf[2 * i + 1] *= weights[i]
    _fft_ptr(buf, n, &plan.rev[0], &plan.tw[0], -1.0, 1)
    for i in range(n):
        v = -dt_over_hbar * buf[2 * i]
        c = cos(v)
        s = sin(v)
        ar = a[2 * i]
        ai = a[2 * i + 1]
        a[2 * i] = ar * c - ai * s
        a[2 * i + 1] = ar * s + ai * c


cdef void _half_kinetic(double* a, const double* kphase_half, _Plan plan) noexcept:
    _fft_ptr(a, plan.n, &plan.rev[0], &plan.tw[0], 1.0, 0)
    _complex_mul_ptr(a, kphase_half, plan.n)
    _fft_ptr(a, plan.n, &plan.rev[0], &plan.tw[0], -1.0, 1)


def whitenoise_trajectory(psi0, x, dx, kphase_half, weights, dt_over_hbar,
                          normals, record_every=0):
    """See qjumps._kernels_py.whitenoise_trajectory."""
    psi_arr = np.array(psi0, dtype=np.complex128)
    cdef double complex[::1] psi_mv = psi_arr
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    kph_arr = np.ascontiguousarray(kphase_half, dtype=np.complex128)
    cdef const double complex[::1] kph_mv = kph_arr
    cdef const double[::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[:, ::1] zv = np.ascontiguousarray(normals, dtype=np.float64)
    cdef Py_ssize_t n = psi_mv.shape[0]
    cdef Py_ssize_t n_steps = zv.shape[0]
    cdef _Plan plan = _get_plan(n)
    cdef double* a = <double*> &psi_mv[0]
    cdef const double* xp = &xv[0]
    cdef const double* kp = <const double*> &kph_mv[0]
    cdef const double* wp = &wv[0]
    cdef double dxc = dx, doh = dt_over_hbar
    cdef Py_ssize_t rec_every = record_every

    cdef Py_ssize_t n_rec = 0
    if rec_every > 0:
        n_rec = (n_steps + rec_every - 1) // rec_every + 1
    rec_steps = np.zeros(n_rec, dtype=np.int64)
    rec_xmean = np.zeros(n_rec)
    rec_var = np.zeros(n_rec)
    rec_norm = np.zeros(n_rec)
    cdef cnp.int64_t[::1] rsv = rec_steps
    cdef double[::1] rxv = rec_xmean
    cdef double[::1] rvv = rec_var
    cdef double[::1] rnv = rec_norm
    cdef Py_ssize_t rec_pos = 0

    buf_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] buf_mv = buf_arr
    cdef double* buf = <double*> &buf_mv[0]
    cdef Py_ssize_t k
    cdef double total, xm, var, third
    cdef int status

    for k in range(n_steps):
        if rec_every > 0 and k % rec_every == 0:
            status = _moments_ptr(a, xp, dxc, n, &total, &xm, &var, &third)
            _raise_moments(status, k)
            rsv[rec_pos] = k
            rxv[rec_pos] = xm
            rvv[rec_pos] = var
            rnv[rec_pos] = sqrt(total)
            rec_pos += 1
        _half_kinetic(a, kp, plan)
        _potential_phase(a, &zv[k, 0], wp, doh, buf, plan)
        _half_kinetic(a, kp, plan)

    if rec_every > 0:
        status = _moments_ptr(a, xp, dxc, n, &total, &xm, &var, &third)
        _raise_moments(status, n_steps)
        rsv[rec_pos] = n_steps
        rxv[rec_pos] = xm
        rvv[rec_pos] = var
        rnv[rec_pos] = sqrt(total)

    return psi_arr, rec_steps, rec_xmean, rec_var, rec_norm


def whitenoise_block(psi0, x, dx, kphase_half, weights, dt_over_hbar, n_steps, rngs):
    """See qjumps._kernels_py.whitenoise_block."""
    cdef Py_ssize_t b = len(rngs)
    cdef Py_ssize_t n = len(psi0)
    psi0_arr = np.ascontiguousarray(psi0, dtype=np.complex128)
    finals = np.empty((b, n), dtype=np.complex128)
    cdef double complex[:, ::1] fin = finals
    kph_arr = np.ascontiguousarray(kphase_half, dtype=np.complex128)
    cdef const double complex[::1] kph_mv = kph_arr
    cdef const double[::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    cdef _Plan plan = _get_plan(n)
    cdef const double* kp = <const double*> &kph_mv[0]
    cdef const double* wp = &wv[0]
    cdef double doh = dt_over_hbar
    cdef Py_ssize_t steps = n_steps

    buf_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] buf_mv = buf_arr
    cdef double* buf = <double*> &buf_mv[0]
    cdef double complex[::1] psi_mv
    cdef const double[:, ::1] zv
    cdef double* a
    cdef Py_ssize_t t, k, i

    for t in range(b):
        work = psi0_arr.copy()
        psi_mv = work
        a = <double*> &psi_mv[0]
        zv = rngs[t].standard_normal((steps, n))
        for k in range(steps):
            _half_kinetic(a, kp, plan)
            _potential_phase(a, &zv[k, 0], wp, doh, buf, plan)
            _half_kinetic(a, kp, plan)
        if not isfinite(a[0]):
            raise DivergenceDetectedError(f"norm lost in trajectory {t}")
        for i in range(n):
            fin[t, i] = psi_mv[i]

    return finals
