"""Kernel backend selection.

Imports the compiled Cython extension when present, otherwise the NumPy
implementations.  Set HOLOFORGE_NO_EXT=1 to force the NumPy lane (used by the
benchmark and CI to exercise the fallback).
"""

import os

from . import _kernels_np

if os.environ.get("HOLOFORGE_NO_EXT"):
    _impl = _kernels_np
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_np

BACKEND = "numpy" if _impl is _kernels_np else "compiled"

ZERO_AMPLITUDE = _kernels_np.ZERO_AMPLITUDE
transfer_function = _impl.transfer_function
amplitude_update = _impl.amplitude_update
rms_amplitude_mismatch = _impl.rms_amplitude_mismatch
magnitude_differential = _impl.magnitude_differential
block_mean = _impl.block_mean
psr_accumulate = _impl.psr_accumulate
