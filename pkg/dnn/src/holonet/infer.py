"""Inference: CFLD in, CFLD out, bit-stable for a fixed checkpoint."""

from __future__ import annotations

import numpy as np
import torch

from . import cfld
from .model import PhaseRecoveryNet


def infer_field(model: PhaseRecoveryNet, field: np.ndarray) -> np.ndarray:
    """Run one complex field through the network; returns complex64."""
    model.eval()
    x = torch.from_numpy(cfld.to_channels(field))[None]
    with torch.no_grad():
        out = model(x)[0].numpy()
    return cfld.from_channels(out)


def infer_file(model: PhaseRecoveryNet, input_path, output_path) -> None:
    cfld.write(output_path, infer_field(model, cfld.read(input_path)))
