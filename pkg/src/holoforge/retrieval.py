"""Multi-height iterative phase recovery with a transport-of-intensity start.

One iteration refocuses the running guess to the farthest plane and then
walks back through every nearer plane; at each plane the guess amplitude is
averaged with the measured sqrt-intensity while the phase is kept.  After the
final iteration the field is back-propagated to the sample plane.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .field import ComplexField, OpticalConfig, fft2, ifft2, propagate_array
from .forward import HologramStack

TIE_EPSILON_SCALE = 1e-6
MIN_TIE_SEPARATION_UM = 1.0


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """Recovered sample-plane field plus convergence diagnostics."""

    object_field: ComplexField
    iterations_run: int
    per_iteration_residual: list
    heights_used: list
    z2_um: float


def _tie_phase(intensities, z_um, pitch_um, wavelength_um,
               eps_scale=TIE_EPSILON_SCALE):
    """Solve the transport-of-intensity equation for the phase at the middle plane.

    Axial derivative by finite difference between the bracketing planes,
    uniform-intensity approximation I ~ mean(I_mid), FFT inverse Laplacian
    with Tikhonov offset eps to remove the DC singularity.
    """
    i_lo, i_mid, i_hi = intensities
    z_lo, _, z_hi = z_um
    if z_hi - z_lo < MIN_TIE_SEPARATION_UM:
        raise ValueError(
            f"bracketing planes are {z_hi - z_lo:.3f} um apart; "
            f"axial derivative needs >= {MIN_TIE_SEPARATION_UM} um")
    k = 2.0 * np.pi / wavelength_um
    didz = (i_hi - i_lo) / (z_hi - z_lo)
    n_rows, n_cols = i_mid.shape
    fy = np.fft.fftfreq(n_rows, d=pitch_um)[:, None]
    fx = np.fft.fftfreq(n_cols, d=pitch_um)[None, :]
    k2 = 4.0 * np.pi**2 * (fx * fx + fy * fy)
    eps = eps_scale * k2.max()
    rhs = k * didz / float(np.mean(i_mid))
    return np.real(ifft2(fft2(rhs) / (k2 + eps)))


def tie_initial_phase(stack: HologramStack, eps_scale: float = TIE_EPSILON_SCALE) -> ComplexField:
    """Initial complex field at the second-to-last plane.

    Uses the first, second-to-last and last holograms: the outer pair gives
    the axial intensity derivative centred on the middle plane, whose phase is
    recovered by the TIE solver and combined with sqrt of the middle-plane
    intensity.
    """
    if len(stack.planes) < 3:
        raise ValueError("TIE initialization needs at least 3 planes")
    k = len(stack.planes)
    idx = (0, k - 2, k - 1)
    ints = [stack.planes[i][0] for i in idx]
    zs = [stack.planes[i][1] for i in idx]
    phi = _tie_phase(ints, zs, stack.pitch_um, stack.cfg.wavelength_um, eps_scale)
    u = np.sqrt(ints[1]) * np.exp(1j * phi)
    return ComplexField(u, stack.pitch_um)


def _amplitude_pass(u, target_sqrt):
    """Residual before update, then in-place amplitude averaging."""
    res = kernels.rms_amplitude_mismatch(u, target_sqrt)
    kernels.amplitude_update(u, target_sqrt)
    return res


def iterate_once(field_in: ComplexField, stack: HologramStack, plane_index: int,
                 direction: int) -> ComplexField:
    """Single step: propagate from plane_index to the neighbour and update there."""
    if direction not in (-1, 1):
        raise ValueError("direction must be +1 or -1")
    nxt = plane_index + direction
    if not 0 <= nxt < len(stack.planes):
        raise ValueError("next plane index out of range")
    u = field_in.data.astype(np.complex128)
    u = propagate_array(u, stack.planes[nxt][1] - stack.planes[plane_index][1],
                        stack.pitch_um, stack.cfg.wavelength_um)
    _amplitude_pass(u, np.sqrt(stack.planes[nxt][0]))
    return ComplexField(u, stack.pitch_um)


def multiheight_recover(stack: HologramStack, iterations: int = 50,
                        use_tie: bool = True, z2_um: float | None = None,
                        min_improvement: float = 1e-6,
                        tie_eps_scale: float = TIE_EPSILON_SCALE) -> ReconstructionResult:
    """Recover the complex object field from a stack of intensity holograms.

    z2_um is the sample-plane back-propagation distance; when None it is
    estimated by autofocus on the first hologram.  Early exit when the
    residual improves by less than min_improvement over 5 iterations.
    """
    if iterations < 1:
        raise ValueError("iteration count must be >= 1")
    n_planes = len(stack.planes)
    if n_planes == 1:
        warnings.warn("single-plane stack: recovery degenerates to "
                      "back-propagation with amplitude replacement")
    if z2_um is None:
        from .autofocus import autofocus
        z2_um = autofocus(stack.planes[0][0], stack.cfg, stack.pitch_um).z_best_um

    sqrts = [np.sqrt(img) for img, _ in stack.planes]
    zs = stack.z_um

    if use_tie and n_planes >= 3:
        u = tie_initial_phase(stack, tie_eps_scale).data.astype(np.complex128)
        current = n_planes - 2
    else:
        if use_tie and n_planes < 3:
            warnings.warn("fewer than 3 planes: TIE initialization skipped")
        current = max(n_planes - 2, 0)
        u = sqrts[current].astype(np.complex128)

    residuals = []
    mean_amp = float(np.mean(sqrts[0]))
    for it in range(iterations):
        acc = 0.0
        for target in range(n_planes - 1, -1, -1):
            u = propagate_array(u, zs[target] - zs[current], stack.pitch_um,
                                stack.cfg.wavelength_um)
            current = target
            acc += _amplitude_pass(u, sqrts[target])
        residuals.append(acc / (n_planes * mean_amp))
        if it >= 5 and residuals[-6] - residuals[-1] < min_improvement:
            break

    # the loop ends at plane 0; z2_um is that plane's distance from the sample
    u = propagate_array(u, -z2_um, stack.pitch_um, stack.cfg.wavelength_um)
    return ReconstructionResult(
        object_field=ComplexField(u, stack.pitch_um),
        iterations_run=len(residuals),
        per_iteration_residual=residuals,
        heights_used=list(zs),
        z2_um=float(z2_um),
    )
