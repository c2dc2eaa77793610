"""holonet: learned single-shot holographic phase recovery.

Trains a multi-scale residual CNN on (back-propagated input, multi-height
target) pairs exported by the holoforge toolkit and reconstructs artifact-free
complex fields from a single hologram.  Talks to the primary toolkit only
through its file formats (CFLD fields, archive manifests) and CLI.
"""

__version__ = "0.1.0"

from .archive import PairArchive, PairDataset
from .checkpoint import load as load_checkpoint
from .checkpoint import save as save_checkpoint
from .infer import infer_field, infer_file
from .loss import recovery_loss
from .model import NetworkSpec, PhaseRecoveryNet, parameter_count
from .train import TrainConfig, TrainResult, overfit_single_pair, train

__all__ = [
    "__version__",
    "PairArchive", "PairDataset",
    "NetworkSpec", "PhaseRecoveryNet", "parameter_count",
    "recovery_loss",
    "TrainConfig", "TrainResult", "train", "overfit_single_pair",
    "infer_field", "infer_file",
    "load_checkpoint", "save_checkpoint",
]
