"""Pixel super-resolution: non-iterative fusion of sub-pixel-shifted frames.

Each low-res sample is splatted onto the high-res cell its (shifted) pixel
centre falls on; cells collecting several samples take their mean.  For pure
translations and a common pixel aperture this interleaving is the
maximum-likelihood fusion under i.i.d. Gaussian noise, and it leaves the
pixel-aperture low-pass in place (optional Wiener deconvolution undoes it).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve

from . import kernels
from .field import fft2, ifft2


@dataclass(frozen=True, eq=False)
class ShiftedFrameSet:
    """Low-res frames with known sensor offsets (dx, dy) in micrometers."""

    frames: tuple  # ((image, (dx_um, dy_um)), ...)
    lr_pitch_um: float
    factor: int

    def __post_init__(self):
        if self.factor < 1:
            raise ValueError("factor must be >= 1")
        if len(self.frames) < 1:
            raise ValueError("need at least one frame")
        shape = self.frames[0][0].shape
        for img, (dx, dy) in self.frames:
            if img.shape != shape:
                raise ValueError("all frames must share one shape")
            if abs(dx) >= self.lr_pitch_um or abs(dy) >= self.lr_pitch_um:
                raise ValueError("shifts must stay within one LR pixel period")

    @property
    def hr_pitch_um(self) -> float:
        return self.lr_pitch_um / self.factor


def _offsets(fset: ShiftedFrameSet):
    """Integer HR-cell offset of each frame, modulo the upsampling factor."""
    k = fset.factor
    hp = fset.hr_pitch_um
    out = []
    for _, (dx, dy) in fset.frames:
        out.append((int(round(dy / hp)) % k, int(round(dx / hp)) % k))
    return out


def _fill_uncovered(num: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Bilinear fill of empty HR cells by normalized neighbourhood convolution."""
    kernel = np.array([[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 2.0, 1.0]]) / 16.0
    out = np.where(weight > 0, num / np.where(weight > 0, weight, 1.0), 0.0)
    covered = (weight > 0).astype(np.float64)
    for _ in range(8):  # each pass closes one-cell holes
        holes = covered == 0.0
        if not holes.any():
            break
        smoothed = convolve(out * covered, kernel, mode="wrap")
        norm = convolve(covered, kernel, mode="wrap")
        fillable = holes & (norm > 0)
        out[fillable] = smoothed[fillable] / norm[fillable]
        covered[fillable] = 1.0
    return out


def psr_fuse(fset: ShiftedFrameSet, deconvolve: bool = False,
             nsr: float = 1e-3) -> np.ndarray:
    """Fuse the frame set into one factor-times-finer image.

    Offsets missing from the k x k sub-pixel grid leave uncovered HR cells;
    those are bilinearly interpolated from neighbours with a warning.
    """
    k = fset.factor
    r, c = fset.frames[0][0].shape
    acc = np.zeros((r * k, c * k), dtype=np.float64)
    weight = np.zeros_like(acc)
    centre = (k - 1) // 2  # LR sample lands on its aperture's centre HR cell
    for (img, _), (off_r, off_c) in zip(fset.frames, _offsets(fset)):
        kernels.psr_accumulate(acc, weight, np.asarray(img, dtype=np.float64),
                               off_r + centre, off_c + centre, k)
    if (weight == 0).any():
        warnings.warn("shift pattern does not cover the full sub-pixel grid; "
                      "uncovered positions filled by interpolation")
        hr = _fill_uncovered(acc, weight)
    else:
        hr = acc / weight
    if deconvolve:
        hr = _wiener_box_deconvolve(hr, k, nsr)
    return hr


def _wiener_box_deconvolve(img: np.ndarray, k: int, nsr: float) -> np.ndarray:
    """Undo the k x k pixel-aperture box blur with a Wiener filter."""
    psf = np.zeros_like(img)
    psf[:k, :k] = 1.0 / (k * k)
    psf = np.roll(psf, (-(k // 2), -(k // 2)), axis=(0, 1))
    otf = fft2(psf)
    filt = np.conj(otf) / (np.abs(otf) ** 2 + nsr)
    return np.real(ifft2(fft2(img) * filt))
