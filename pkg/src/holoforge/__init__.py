"""holoforge: lensfree in-line holography simulation and reconstruction.

Simulates in-line holograms of synthetic specimens, recovers the complex
object field by multi-height iterative phase retrieval with a TIE initial
guess, estimates the sample-to-sensor distance by autofocus, fuses sub-pixel
shifted frames (pixel super-resolution), scores results (SSIM, per-cell phase
integrals, scattering ratio) and exports training pairs for a companion
single-shot reconstruction network.
"""

__version__ = "0.1.0"

from .autofocus import FocusScanResult, autofocus, focus_criterion
from .dataset import TrainingPairArchive, defocus_sweep, make_pairs
from .field import (ComplexField, NumericalError, OpticalConfig,
                    backpropagate_hologram, propagate)
from .forward import (HologramStack, Phantom, default_heights, sensor_downsample,
                      synthesize_hologram, synthesize_stack)
from .metrics import (CellMeasurement, SsimParams, effective_refractive_volume,
                      measure_cells, phase_integral, scattering_ratio,
                      segment_cells, ssim, ssim_pair)
from .phantoms import make_phantom, scale_to_scattering, scattering_rms
from .psr import ShiftedFrameSet, psr_fuse
from .retrieval import (ReconstructionResult, iterate_once, multiheight_recover,
                        tie_initial_phase)

__all__ = [
    "__version__",
    "ComplexField", "OpticalConfig", "NumericalError",
    "propagate", "backpropagate_hologram",
    "Phantom", "HologramStack", "default_heights",
    "synthesize_hologram", "synthesize_stack", "sensor_downsample",
    "make_phantom", "scale_to_scattering", "scattering_rms",
    "ReconstructionResult", "tie_initial_phase", "multiheight_recover",
    "iterate_once",
    "FocusScanResult", "focus_criterion", "autofocus",
    "ShiftedFrameSet", "psr_fuse",
    "SsimParams", "CellMeasurement", "ssim", "ssim_pair", "phase_integral",
    "effective_refractive_volume", "scattering_ratio", "segment_cells",
    "measure_cells",
    "TrainingPairArchive", "make_pairs", "defocus_sweep",
]
