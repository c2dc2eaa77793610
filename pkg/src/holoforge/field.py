"""Complex optical fields and free-space propagation.

The propagator is the band-limited angular-spectrum method with the plane-wave
carrier factored out (see kernels.transfer_function), computed in double
precision with complex64 storage on the ComplexField container.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft as _sfft

from . import kernels

MAX_DISTANCE_UM = 1.0e5
MIN_SIDE = 8

_fft_workers = 1


class NumericalError(ValueError):
    """A field contains non-finite samples."""


def set_fft_workers(n: int) -> None:
    """Set the worker count for FFT calls (HOLOFORGE_THREADS / --threads)."""
    global _fft_workers
    _fft_workers = max(1, int(n))


def fft2(a: np.ndarray) -> np.ndarray:
    return _sfft.fft2(a, workers=_fft_workers)


def ifft2(a: np.ndarray) -> np.ndarray:
    return _sfft.ifft2(a, workers=_fft_workers)


@dataclass(frozen=True)
class OpticalConfig:
    """Imaging geometry: wavelength, sample-to-sensor distance, medium index.

    All lengths are in micrometers.  The sensor pitch lives on ComplexField;
    the sensor is allowed to undersample (pixel super-resolution addresses it).
    """

    wavelength_um: float = 0.53
    z2_um: float = 300.0
    n0: float = 1.0

    def __post_init__(self):
        if self.wavelength_um <= 0.0:
            raise ValueError("wavelength must be positive")
        if self.z2_um < 0.0:
            raise ValueError("z2 must be non-negative")
        if self.n0 <= 0.0:
            raise ValueError("refractive index must be positive")


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Sampled 2-D complex field on an isotropic grid.

    data: complex64, shape (height N, width M), row-major, read-only.
    pitch_um: sample spacing in micrometers per pixel.
    """

    data: np.ndarray
    pitch_um: float

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.complex64, order="C", copy=True)
        if arr.ndim != 2:
            raise ValueError("field data must be 2-D")
        if arr.shape[0] < MIN_SIDE or arr.shape[1] < MIN_SIDE:
            raise ValueError(f"field must be at least {MIN_SIDE}x{MIN_SIDE}")
        if not self.pitch_um > 0.0:
            raise ValueError("pitch must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def amplitude(self) -> np.ndarray:
        return np.abs(self.data).astype(np.float64)

    def phase(self) -> np.ndarray:
        return np.angle(self.data).astype(np.float64)

    def intensity(self) -> np.ndarray:
        a = self.data.astype(np.complex128)
        return (a.real**2 + a.imag**2)


@lru_cache(maxsize=256)
def _cached_transfer(n_rows: int, n_cols: int, pitch: float, wavelength: float,
                     distance: float) -> np.ndarray:
    h = kernels.transfer_function(n_rows, n_cols, pitch, wavelength, distance)
    h.setflags(write=False)
    return h


def propagate_array(u: np.ndarray, distance_um: float, pitch_um: float,
                    wavelength_um: float) -> np.ndarray:
    """Propagate a complex128 array by `distance_um`; the double-precision core.

    Linear and unitary on the retained frequency band; energy is conserved up
    to band-limit truncation.
    """
    if distance_um == 0.0:
        return u.copy()
    h = _cached_transfer(u.shape[0], u.shape[1], float(pitch_um),
                         float(wavelength_um), float(distance_um))
    return ifft2(fft2(u) * h)


def propagate(field_in: ComplexField, distance_um: float, cfg: OpticalConfig,
              pad_factor: int = 1) -> ComplexField:
    """Free-space propagate a field by a signed distance in micrometers.

    pad_factor > 1 embeds the field in an edge-replicated canvas of that
    multiple before transforming, for scenes where periodic wrap matters.
    """
    if not np.isfinite(distance_um) or abs(distance_um) >= MAX_DISTANCE_UM:
        raise ValueError(f"|distance| must be < {MAX_DISTANCE_UM:g} um")
    if not np.all(np.isfinite(field_in.data)):
        raise NumericalError("input field contains non-finite samples")
    if distance_um == 0.0:
        return ComplexField(field_in.data, field_in.pitch_um)

    u = field_in.data.astype(np.complex128)
    if pad_factor > 1:
        r, c = u.shape
        pr, pc = (pad_factor - 1) * r // 2, (pad_factor - 1) * c // 2
        u = np.pad(u, ((pr, pr), (pc, pc)), mode="edge")
        out = propagate_array(u, distance_um, field_in.pitch_um, cfg.wavelength_um)
        out = out[pr:pr + r, pc:pc + c]
    else:
        out = propagate_array(u, distance_um, field_in.pitch_um, cfg.wavelength_um)
    return ComplexField(out, field_in.pitch_um)


def backpropagate_hologram(intensity: np.ndarray, cfg: OpticalConfig,
                           pitch_um: float, pad_factor: int = 1) -> ComplexField:
    """Back-propagate a recorded hologram intensity to the sample plane.

    sqrt(intensity) is treated as a zero-phase field and propagated by -z2.
    Without phase retrieval the result carries the twin-image and
    self-interference artifacts; it is the single-shot reconstruction input.
    """
    intensity = np.asarray(intensity, dtype=np.float64)
    if not np.all(np.isfinite(intensity)):
        raise NumericalError("hologram contains non-finite samples")
    if intensity.min() < 0.0:
        raise ValueError("hologram intensity must be non-negative")
    f = ComplexField(np.sqrt(intensity).astype(np.complex128), pitch_um)
    return propagate(f, -cfg.z2_um, cfg, pad_factor=pad_factor)
