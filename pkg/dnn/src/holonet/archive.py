"""Training-pair archive reader (the holoforge export-training layout).

The archive is a directory with manifest.json and per-pair input/target CFLD
files; pairs carry train/val/test split labels.  Loaded pairs become float32
(2, H, W) real/imaginary channel tensors.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import Dataset

from . import cfld


class PairArchive:
    def __init__(self, root):
        self.root = Path(root)
        with open(self.root / "manifest.json") as fh:
            self.manifest = json.load(fh)

    def entries(self, split: str | None = None) -> list:
        pairs = self.manifest["pairs"]
        if split is not None:
            pairs = [p for p in pairs if p["split"] == split]
        return pairs

    def splits(self) -> set:
        return {p["split"] for p in self.manifest["pairs"]}

    def load_pair(self, entry: dict) -> tuple:
        x = cfld.read(self.root / entry["input"])
        y = cfld.read(self.root / entry["target"])
        return cfld.to_channels(x), cfld.to_channels(y)


class PairDataset(Dataset):
    """Torch view of one split, fully materialized (desk-scale archives)."""

    def __init__(self, archive: PairArchive, split: str):
        self.items = [archive.load_pair(e) for e in archive.entries(split)]
        if not self.items:
            raise ValueError(f"archive has no pairs in split {split!r}")

    def __len__(self):
        return len(self.items)

    def __getitem__(self, idx):
        x, y = self.items[idx]
        return torch.from_numpy(np.ascontiguousarray(x)), \
            torch.from_numpy(np.ascontiguousarray(y))
