# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-pixel kernels; semantics match _kernels_np exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, sin, sqrt

cnp.import_array()

ZERO_AMPLITUDE = 1e-12
cdef double _ZERO = 1e-12


def transfer_function(int n_rows, int n_cols, double pitch, double wavelength,
                      double distance):
    """Band-limited angular-spectrum transfer function, carrier removed."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] h = np.zeros(
        (n_rows, n_cols), dtype=np.complex128)
    cdef double inv_wl2 = 1.0 / (wavelength * wavelength)
    cdef double inv_wl = 1.0 / wavelength
    cdef double dfy = 1.0 / (n_rows * pitch)
    cdef double dfx = 1.0 / (n_cols * pitch)
    cdef double za = fabs(distance)
    cdef double two_pi_z = 6.283185307179586476925286766559 * distance
    cdef double fy, fx, radicand, limy, limx, phase
    cdef int i, j, ii, jj
    for i in range(n_rows):
        # fftfreq ordering: index i maps to i - n for the negative half
        if i > (n_rows - 1) // 2:
            ii = i - n_rows
        else:
            ii = i
        fy = ii * dfy
        limy = 2.0 * dfy * za * fabs(fy)
        for j in range(n_cols):
            if j > (n_cols - 1) // 2:
                jj = j - n_cols
            else:
                jj = j
            fx = jj * dfx
            radicand = inv_wl2 - fx * fx - fy * fy
            if radicand <= 0.0:
                continue
            limx = 2.0 * dfx * za * fabs(fx)
            if limx * limx > radicand or limy * limy > radicand:
                continue
            phase = two_pi_z * (sqrt(radicand) - inv_wl)
            h[i, j] = cos(phase) + 1j * sin(phase)
    return h


def amplitude_update(cnp.ndarray[cnp.complex128_t, ndim=2] u,
                     cnp.ndarray[cnp.float64_t, ndim=2] target):
    """Average |u| with target in place, keeping the phase of u."""
    cdef int n_rows = u.shape[0], n_cols = u.shape[1]
    cdef double re, im, amp, scale
    cdef int i, j
    for i in range(n_rows):
        for j in range(n_cols):
            re = u[i, j].real
            im = u[i, j].imag
            amp = sqrt(re * re + im * im)
            if amp < _ZERO:
                u[i, j] = 0.5 * target[i, j]
            else:
                scale = (amp + target[i, j]) / (2.0 * amp)
                u[i, j] = (re * scale) + 1j * (im * scale)


def rms_amplitude_mismatch(cnp.ndarray[cnp.complex128_t, ndim=2] u,
                           cnp.ndarray[cnp.float64_t, ndim=2] target):
    """RMS of (|u| - target)."""
    cdef int n_rows = u.shape[0], n_cols = u.shape[1]
    cdef double re, im, d, acc = 0.0
    cdef int i, j
    for i in range(n_rows):
        for j in range(n_cols):
            re = u[i, j].real
            im = u[i, j].imag
            d = sqrt(re * re + im * im) - target[i, j]
            acc += d * d
    return sqrt(acc / (n_rows * n_cols))


def magnitude_differential(cnp.ndarray[cnp.complex128_t, ndim=2] u_plus,
                           cnp.ndarray[cnp.complex128_t, ndim=2] u_minus):
    """Mean absolute difference of the two field magnitudes."""
    cdef int n_rows = u_plus.shape[0], n_cols = u_plus.shape[1]
    cdef double acc = 0.0
    cdef double pr, pi, mr, mi
    cdef int i, j
    for i in range(n_rows):
        for j in range(n_cols):
            pr = u_plus[i, j].real
            pi = u_plus[i, j].imag
            mr = u_minus[i, j].real
            mi = u_minus[i, j].imag
            acc += fabs(sqrt(pr * pr + pi * pi) - sqrt(mr * mr + mi * mi))
    return acc / (n_rows * n_cols)


def block_mean(cnp.ndarray[cnp.float64_t, ndim=2] img, int k):
    """k x k block average; dimensions must divide."""
    cdef int out_r = img.shape[0] // k, out_c = img.shape[1] // k
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty(
        (out_r, out_c), dtype=np.float64)
    cdef double acc, inv = 1.0 / (k * k)
    cdef int i, j, a, b
    for i in range(out_r):
        for j in range(out_c):
            acc = 0.0
            for a in range(k):
                for b in range(k):
                    acc += img[i * k + a, j * k + b]
            out[i, j] = acc * inv
    return out


def psr_accumulate(cnp.ndarray[cnp.float64_t, ndim=2] acc,
                   cnp.ndarray[cnp.float64_t, ndim=2] weight,
                   cnp.ndarray[cnp.float64_t, ndim=2] frame,
                   int off_r, int off_c, int k):
    """Splat one low-res frame onto the high-res grid with periodic wrap."""
    cdef int hr_r = acc.shape[0], hr_c = acc.shape[1]
    cdef int n_rows = frame.shape[0], n_cols = frame.shape[1]
    cdef int i, j, r, c
    for i in range(n_rows):
        r = (i * k + off_r) % hr_r
        if r < 0:
            r += hr_r
        for j in range(n_cols):
            c = (j * k + off_c) % hr_c
            if c < 0:
                c += hr_c
            acc[r, c] += frame[i, j]
            weight[r, c] += 1.0
