"""Sample-to-sensor distance estimation by the axial magnitude differential.

The criterion back-propagates sqrt(intensity) to z +/- delta and averages the
absolute magnitude change; it is minimized at focus for amplitude-contrast
specimens.  A coarse scan brackets the minimum, golden-section search refines
it to 0.01 um.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .field import OpticalConfig, propagate_array

GOLDEN_RATIO_CONJUGATE = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_COARSE = (100.0, 800.0, 10.0)
DEFAULT_PRECISION_UM = 0.01
DEFAULT_DELTA_UM = 0.5


@dataclass(frozen=True, eq=False)
class FocusScanResult:
    """Best focus distance plus the scan and refinement trace."""

    z_best_um: float
    criterion_curve: list
    refinement_history: list
    non_unimodal: bool = False


def focus_criterion(intensity: np.ndarray, z_um: float, cfg: OpticalConfig,
                    pitch_um: float, delta_um: float = DEFAULT_DELTA_UM) -> float:
    """Mean |d|u_z|/dz| by central difference of back-propagated magnitudes."""
    if z_um <= 0.0:
        raise ValueError("z must be positive")
    s = np.sqrt(np.asarray(intensity, dtype=np.float64)).astype(np.complex128)
    u_plus = propagate_array(s, -(z_um + delta_um), pitch_um, cfg.wavelength_um)
    u_minus = propagate_array(s, -(z_um - delta_um), pitch_um, cfg.wavelength_um)
    return kernels.magnitude_differential(u_plus, u_minus) / (2.0 * delta_um)


def golden_section_minimize(fn, lo: float, hi: float, tol: float):
    """Golden-section search; each probe shrinks the bracket by (sqrt(5)-1)/2.

    Returns (x_best, f_best, history) where history holds the bracket after
    every probe and terminates once the bracket is narrower than tol.
    """
    history = []
    width = hi - lo
    c = hi - GOLDEN_RATIO_CONJUGATE * width
    d = lo + GOLDEN_RATIO_CONJUGATE * width
    fc, fd = fn(c), fn(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN_RATIO_CONJUGATE * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN_RATIO_CONJUGATE * (hi - lo)
            fd = fn(d)
        history.append((lo, hi))
    x = 0.5 * (lo + hi)
    return x, min(fc, fd), history


def autofocus(intensity: np.ndarray, cfg: OpticalConfig, pitch_um: float,
              coarse=DEFAULT_COARSE, precision_um: float = DEFAULT_PRECISION_UM,
              delta_um: float = DEFAULT_DELTA_UM) -> FocusScanResult:
    """Locate the focus distance: coarse scan then golden-section refinement.

    If the refined minimum is not consistent with the coarse scan (criterion
    not unimodal inside the bracket) the coarse argmin is returned with the
    non_unimodal flag set.
    """
    z_lo, z_hi, step = coarse
    zs = np.arange(z_lo, z_hi + 0.5 * step, step)
    scores = [focus_criterion(intensity, z, cfg, pitch_um, delta_um) for z in zs]
    curve = list(zip(zs.tolist(), scores))
    i_min = int(np.argmin(scores))

    lo = zs[max(i_min - 1, 0)]
    hi = zs[min(i_min + 1, len(zs) - 1)]
    z_best, f_best, history = golden_section_minimize(
        lambda z: focus_criterion(intensity, z, cfg, pitch_um, delta_um),
        float(lo), float(hi), precision_um)

    non_unimodal = (i_min in (0, len(zs) - 1)) or f_best > scores[i_min] * (1.0 + 1e-9)
    if non_unimodal:
        z_best = float(zs[i_min])
    return FocusScanResult(z_best, curve, history, non_unimodal)


def expected_probe_count(width0: float, tol: float) -> int:
    """Probes needed for golden-section to shrink width0 below tol."""
    return math.ceil(math.log(width0 / tol) / math.log(1.0 / GOLDEN_RATIO_CONJUGATE))


def refine_after_recovery(recovered_intensity: np.ndarray, cfg: OpticalConfig,
                          pitch_um: float, z_hint_um: float,
                          half_window_um: float = 20.0,
                          precision_um: float = DEFAULT_PRECISION_UM) -> FocusScanResult:
    """Re-run autofocus near a known focus on a phase-recovered intensity."""
    coarse = (max(z_hint_um - half_window_um, 1.0), z_hint_um + half_window_um, 2.0)
    return autofocus(recovered_intensity, cfg, pitch_um, coarse, precision_um)
