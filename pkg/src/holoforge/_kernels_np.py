"""NumPy implementations of the per-pixel hot kernels.

These are the reference semantics for the compiled extension in _kernels.pyx;
holoforge.kernels selects one lane at import. tests/test_kernels.py holds the
two lanes to agreement, and benchmarks/bench_kernels.py compares their speed.
"""

import numpy as np

ZERO_AMPLITUDE = 1e-12


def transfer_function(n_rows: int, n_cols: int, pitch: float, wavelength: float,
                      distance: float) -> np.ndarray:
    """Band-limited angular-spectrum transfer function, carrier removed.

    H(fx, fy) = exp(i 2 pi z (sqrt(1/wl^2 - fx^2 - fy^2) - 1/wl)) where the
    radicand is positive (propagating waves) and the local fringe frequency of
    H stays representable on the frequency grid, i.e. per axis
    (2 df z |f|)^2 <= radicand; zero elsewhere.  The second condition limits
    the impulse response to the computation window so periodic wraparound does
    not contaminate the result.  Factoring out the plane-wave carrier
    exp(i 2 pi z / wl) keeps a unit plane wave exactly invariant, so the
    zero-phase reference convention holds at every plane.
    """
    fy = np.fft.fftfreq(n_rows, d=pitch)[:, None]
    fx = np.fft.fftfreq(n_cols, d=pitch)[None, :]
    radicand = 1.0 / wavelength**2 - fx * fx - fy * fy
    keep = radicand > 0.0
    za = abs(distance)
    dfy = 1.0 / (n_rows * pitch)
    dfx = 1.0 / (n_cols * pitch)
    keep &= (2.0 * dfx * za * np.abs(fx)) ** 2 <= radicand
    keep &= (2.0 * dfy * za * np.abs(fy)) ** 2 <= radicand
    h = np.zeros((n_rows, n_cols), dtype=np.complex128)
    h[keep] = np.exp(
        1j * 2.0 * np.pi * distance * (np.sqrt(radicand[keep]) - 1.0 / wavelength)
    )
    return h


def amplitude_update(u: np.ndarray, target: np.ndarray) -> None:
    """Average |u| with `target` in place, keeping the phase of u.

    new amplitude = (|u| + target)/2.  Pixels with |u| below ZERO_AMPLITUDE
    carry no phase and become target/2 (real, zero phase).
    """
    amp = np.abs(u)
    zero = amp < ZERO_AMPLITUDE
    safe = np.where(zero, 1.0, amp)
    u *= (amp + target) / (2.0 * safe)
    if zero.any():
        u[zero] = 0.5 * target[zero]


def rms_amplitude_mismatch(u: np.ndarray, target: np.ndarray) -> float:
    """RMS of (|u| - target), accumulated in float64."""
    d = np.abs(u) - target
    return float(np.sqrt(np.mean(d * d)))


def magnitude_differential(u_plus: np.ndarray, u_minus: np.ndarray) -> float:
    """Mean absolute difference of the two field magnitudes."""
    return float(np.mean(np.abs(np.abs(u_plus) - np.abs(u_minus))))


def block_mean(img: np.ndarray, k: int) -> np.ndarray:
    """k x k block average (pixel-aperture integration); dims must divide."""
    r, c = img.shape
    out = img.reshape(r // k, k, c // k, k).mean(axis=(1, 3), dtype=np.float64)
    return np.ascontiguousarray(out)


def psr_accumulate(acc: np.ndarray, weight: np.ndarray, frame: np.ndarray,
                   off_r: int, off_c: int, k: int) -> None:
    """Splat one low-res frame onto the high-res grid at sub-pixel offset.

    LR sample (m, n) lands on HR cell ((k*m + off_r) % R, (k*n + off_c) % C);
    periodic wrap matches the Fourier-shift forward model.
    """
    rows = (np.arange(frame.shape[0]) * k + off_r) % acc.shape[0]
    cols = (np.arange(frame.shape[1]) * k + off_c) % acc.shape[1]
    acc[np.ix_(rows, cols)] += frame
    weight[np.ix_(rows, cols)] += 1.0
