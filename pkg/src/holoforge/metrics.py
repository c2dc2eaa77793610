"""Quantitative evaluation: SSIM, per-cell phase integrals, scattering ratio.

SSIM follows the classic single-window form
    (2 mu1 mu2 + c1)(2 cov + c2) / ((mu1^2 + mu2^2 + c1)(var1 + var2 + c2))
computed globally by default (one scalar per image pair), optionally as a
sliding-window mean.  Phase integrals and effective refractive volumes follow
p = |sum(phi) * pitch^2| and V_eff = p * lambda / (2 pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import label, uniform_filter

from .field import ComplexField


@dataclass(frozen=True)
class SsimParams:
    """Stabilization constants, dynamic range and window of the SSIM index."""

    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float | None = None  # None: combined min/max of both images
    window: int | None = None  # None: single global window

    def __post_init__(self):
        if not 0.0 < self.k1 < 1.0 or not 0.0 < self.k2 < 1.0:
            raise ValueError("K1, K2 must lie in (0, 1)")
        if self.window is not None and self.window < 2:
            raise ValueError("window side must be >= 2")


@dataclass(frozen=True)
class CellMeasurement:
    """Per-cell morphology numbers derived from a recovered phase image."""

    cell_id: int
    area_um2: float
    phase_integral: float  # rad um^2
    effective_volume_fl: float

    def __post_init__(self):
        if self.phase_integral < 0.0:
            raise ValueError("phase integral is an absolute value")


def ssim(img1: np.ndarray, img2: np.ndarray, params: SsimParams | None = None) -> float:
    """Structural similarity between two real images; 1.0 for identical ones."""
    if params is None:
        params = SsimParams()
    a = np.asarray(img1, dtype=np.float64)
    b = np.asarray(img2, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    rng = params.dynamic_range
    if rng is None:
        rng = max(a.max(), b.max()) - min(a.min(), b.min())
        if rng == 0.0:
            return 1.0  # both images are one identical constant
    c1 = (params.k1 * rng) ** 2
    c2 = (params.k2 * rng) ** 2

    if params.window is None:
        mu1, mu2 = a.mean(), b.mean()
        var1, var2 = a.var(), b.var()
        cov = ((a - mu1) * (b - mu2)).mean()
        return float(((2.0 * mu1 * mu2 + c1) * (2.0 * cov + c2))
                     / ((mu1 * mu1 + mu2 * mu2 + c1) * (var1 + var2 + c2)))

    w = params.window
    mu1 = uniform_filter(a, w, mode="reflect")
    mu2 = uniform_filter(b, w, mode="reflect")
    var1 = uniform_filter(a * a, w, mode="reflect") - mu1 * mu1
    var2 = uniform_filter(b * b, w, mode="reflect") - mu2 * mu2
    cov = uniform_filter(a * b, w, mode="reflect") - mu1 * mu2
    smap = ((2.0 * mu1 * mu2 + c1) * (2.0 * cov + c2)) \
        / ((mu1 * mu1 + mu2 * mu2 + c1) * (var1 + var2 + c2))
    return float(smap.mean())


def ssim_pair(recon: np.ndarray, reference: np.ndarray,
              params: SsimParams | None = None) -> tuple:
    """(real-part SSIM, imaginary-part SSIM) against a complex reference.

    The dynamic range is the reference real/imag range respectively, matching
    the convention of scoring each channel against the gold standard.
    """
    if params is None:
        params = SsimParams()
    out = []
    for part in ("real", "imag"):
        r = getattr(np.asarray(recon), part)
        g = getattr(np.asarray(reference), part)
        rng = params.dynamic_range
        if rng is None:
            rng = float(g.max() - g.min())
        out.append(ssim(r, g, SsimParams(params.k1, params.k2, rng, params.window)))
    return tuple(out)


def phase_integral(phase: np.ndarray, mask: np.ndarray, pitch_um: float) -> float:
    """|integral of the background-relative phase over one cell|, rad um^2."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("mask selects no pixels")
    total = float(np.sum(np.asarray(phase, dtype=np.float64)[mask]))
    return abs(total) * pitch_um * pitch_um


def effective_refractive_volume(p: float, wavelength_um: float) -> float:
    """V_eff = p * lambda / (2 pi); um^3 equals femtoliters one-to-one."""
    if p < 0.0:
        raise ValueError("phase integral must be non-negative")
    return p * wavelength_um / (2.0 * np.pi)


def scattering_ratio(u, background_mask: np.ndarray,
                     analysis_mask: np.ndarray | None = None) -> float:
    """RMS modulus of the scattered wave over the reference modulus.

    The reference A is the mean of u over the object-free background region;
    R = sqrt(mean |u/A - 1|^2) over the analysis region (whole image when
    None).  Invariant to global complex scaling of u.
    """
    data = u.data if isinstance(u, ComplexField) else np.asarray(u)
    data = data.astype(np.complex128)
    background_mask = np.asarray(background_mask, dtype=bool)
    if not background_mask.any():
        raise ValueError("background region is empty")
    a = data[background_mask].mean()
    if abs(a) < 1e-9:
        raise ValueError("background mean is ~0; cannot normalize")
    norm = data / a - 1.0
    if analysis_mask is not None:
        norm = norm[np.asarray(analysis_mask, dtype=bool)]
    return float(np.sqrt(np.mean(norm.real**2 + norm.imag**2)))


def segment_cells(phase: np.ndarray, threshold_rad: float,
                  min_area_px: int = 10) -> list:
    """Connected components of {phase > threshold}, 8-connectivity.

    Components smaller than min_area_px pixels are dropped.  The phase must be
    background-flattened beforehand.
    """
    mask = np.asarray(phase, dtype=np.float64) > threshold_rad
    labels, count = label(mask, structure=np.ones((3, 3), dtype=int))
    out = []
    for i in range(1, count + 1):
        comp = labels == i
        if comp.sum() >= min_area_px:
            out.append(comp)
    return out


def measure_cells(phase: np.ndarray, pitch_um: float, wavelength_um: float,
                  threshold_rad: float, background_mask: np.ndarray | None = None,
                  min_area_px: int = 10) -> list:
    """Segment cells and report per-cell area, phase integral and volume.

    The background reference phase (median over background_mask, or over the
    sub-threshold pixels when None) is subtracted before integrating.
    """
    phase = np.asarray(phase, dtype=np.float64)
    if background_mask is None:
        background_mask = phase <= threshold_rad
    ref = float(np.median(phase[np.asarray(background_mask, dtype=bool)]))
    flat = phase - ref
    cells = []
    for i, mask in enumerate(segment_cells(flat, threshold_rad, min_area_px)):
        p = phase_integral(flat, mask, pitch_um)
        cells.append(CellMeasurement(
            cell_id=i,
            area_um2=float(mask.sum()) * pitch_um * pitch_um,
            phase_integral=p,
            effective_volume_fl=effective_refractive_volume(p, wavelength_um),
        ))
    return cells
