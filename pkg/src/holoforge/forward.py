"""Hologram synthesis: the in-line interference forward model.

The sensor records I = |A + a|^2 where A = 1 is the unit zero-phase reference
and a is the wave scattered by the specimen transmission t, so
I = |propagate(t, z)|^2.  Sub-pixel sensor offsets are applied by Fourier
shift before intensity detection; block averaging models the pixel aperture.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .field import ComplexField, OpticalConfig, NumericalError, fft2, ifft2, propagate_array


@dataclass(frozen=True)
class Phantom:
    """Complex specimen transmission plus a sample-class tag."""

    transmission: ComplexField
    label: str = "cell-like"

    def __post_init__(self):
        amp = np.abs(self.transmission.data)
        if amp.max() > 1.0 + 1e-5:
            raise ValueError("|transmission| must not exceed 1")


@dataclass(frozen=True, eq=False)
class HologramStack:
    """Co-registered intensity holograms with absolute axial positions.

    planes: tuple of (intensity float64 array, z_um) with strictly increasing
    z; all images share one shape and the sensor grid offset shift_um.
    """

    planes: tuple
    cfg: OpticalConfig
    pitch_um: float
    shift_um: tuple = (0.0, 0.0)

    def __post_init__(self):
        if len(self.planes) < 1:
            raise ValueError("stack needs at least one plane")
        zs = [z for _, z in self.planes]
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise ValueError("plane z values must be strictly increasing")
        shape = self.planes[0][0].shape
        for img, _ in self.planes:
            if img.shape != shape:
                raise ValueError("all planes must share one shape")
            if not np.all(np.isfinite(img)):
                raise NumericalError("plane intensity contains non-finite samples")
            if img.min() < 0.0:
                raise ValueError("intensities must be non-negative")

    @property
    def z_um(self) -> list:
        return [z for _, z in self.planes]

    @property
    def intensities(self) -> list:
        return [img for img, _ in self.planes]

    def first(self, k: int) -> "HologramStack":
        """Sub-stack of the first k planes (the N_holo = k measurement set)."""
        if not 1 <= k <= len(self.planes):
            raise ValueError("k out of range")
        return HologramStack(self.planes[:k], self.cfg, self.pitch_um, self.shift_um)


def default_heights(z2_um: float) -> list:
    """The eight acquisition distances: z2 + {0, 15, ..., 90, 180} um."""
    return [z2_um + dz for dz in (0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0, 180.0)]


def _shifted(u: np.ndarray, pitch_um: float, shift_um: tuple) -> np.ndarray:
    """Sample the field on a sensor grid offset by (dx, dy) um: u(x+dx, y+dy)."""
    dx, dy = shift_um
    if dx == 0.0 and dy == 0.0:
        return u
    fy = np.fft.fftfreq(u.shape[0], d=pitch_um)[:, None]
    fx = np.fft.fftfreq(u.shape[1], d=pitch_um)[None, :]
    return ifft2(fft2(u) * np.exp(2j * np.pi * (fx * dx + fy * dy)))


def synthesize_hologram(phantom: Phantom, z_um: float, cfg: OpticalConfig,
                        shift_um: tuple = (0.0, 0.0)) -> np.ndarray:
    """Intensity recorded at distance z_um behind the specimen (A = 1)."""
    if z_um <= 0.0:
        raise ValueError("sensor distance must be positive")
    u = phantom.transmission.data.astype(np.complex128)
    u = propagate_array(u, z_um, phantom.transmission.pitch_um, cfg.wavelength_um)
    u = _shifted(u, phantom.transmission.pitch_um, shift_um)
    intensity = u.real**2 + u.imag**2
    if not np.all(np.isfinite(intensity)):
        raise NumericalError("synthesized hologram is non-finite")
    return intensity


def apply_sensor_noise(intensity: np.ndarray, rng: np.random.Generator,
                       photons: float | None = None,
                       read_noise: float = 0.0) -> np.ndarray:
    """Poisson shot noise at `photons` per unit intensity plus Gaussian read noise."""
    out = intensity
    if photons:
        out = rng.poisson(np.clip(out, 0.0, None) * photons) / photons
    if read_noise:
        out = out + rng.normal(0.0, read_noise, size=out.shape)
    return np.clip(out, 0.0, None)


def synthesize_stack(phantom: Phantom, heights_um, cfg: OpticalConfig,
                     shift_um: tuple = (0.0, 0.0),
                     photons: float | None = None, read_noise: float = 0.0,
                     rng: np.random.Generator | None = None) -> HologramStack:
    """One hologram per acquisition height, with a common sensor-grid offset."""
    heights = [float(z) for z in heights_um]
    if any(b <= a for a, b in zip(heights, heights[1:])):
        raise ValueError("heights must be strictly increasing (no duplicates)")
    if (photons or read_noise) and rng is None:
        rng = np.random.default_rng(0)
    planes = []
    for z in heights:
        img = synthesize_hologram(phantom, z, cfg, shift_um)
        if photons or read_noise:
            img = apply_sensor_noise(img, rng, photons, read_noise)
        planes.append((img, z))
    return HologramStack(tuple(planes), cfg, phantom.transmission.pitch_um, tuple(shift_um))


def sensor_downsample(intensity: np.ndarray, k: int) -> np.ndarray:
    """k x k pixel-aperture integration (block mean) onto the coarse sensor grid."""
    if k < 1:
        raise ValueError("factor must be >= 1")
    if k == 1:
        return np.asarray(intensity, dtype=np.float64).copy()
    r, c = intensity.shape
    if r % k or c % k:
        raise ValueError(f"factor {k} must divide image dimensions {r}x{c}")
    return kernels.block_mean(np.asarray(intensity, dtype=np.float64), k)
