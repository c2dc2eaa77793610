"""Shared fixtures: training archives and reference fields are produced by the
holoforge CLI (the primary toolkit) and consumed through its file formats only."""

import json
import shutil
import subprocess
import sys

import pytest
import torch

torch.set_num_threads(1)

HOLOFORGE = shutil.which("holoforge")

ARCHIVE_CONFIG = {
    "optical": {"wavelength_um": 0.53, "pitch_um": 1.12, "z2_um": 100.0},
    "heights_um": [0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0, 180.0],
    "phantom": {"kind": "cells", "size": 128, "seed": 100,
                "params": {"num_cells": 35, "phase_rad": [0.6, 1.8],
                           "absorption": [0.15, 0.4]}},
    "dataset": {"num_phantoms": 12, "tiles_per_side": 2, "overlap_px": 32,
                "iterations": 30},
    "seed": 100,
}
# phantom index 11 lands in the test split (4:1:1 cycle); its generator seed
TEST_PHANTOM_SEED = ARCHIVE_CONFIG["seed"] + 11


def run_holoforge(*args):
    if HOLOFORGE is None:
        pytest.skip("holoforge CLI not installed")
    proc = subprocess.run([HOLOFORGE, *args], capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"holoforge {' '.join(args)} failed:\n{proc.stderr}")
    return proc.stdout


@pytest.fixture(scope="session")
def archive_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("pairs")
    cfg = root / "config.json"
    cfg.write_text(json.dumps(ARCHIVE_CONFIG))
    run_holoforge("export-training", "--config", str(cfg),
                  "--out", str(root / "archive"))
    return root / "archive"


@pytest.fixture(scope="session")
def trained(archive_dir):
    """One toy training run shared by the behavioural tests."""
    from holonet import NetworkSpec, PairArchive, TrainConfig, train
    torch.set_num_threads(1)
    result = train(PairArchive(archive_dir), NetworkSpec(features=16),
                   TrainConfig(batch_size=8, max_epochs=240, patience=40, seed=0))
    return result


@pytest.fixture(scope="session")
def test_stack_dir(tmp_path_factory):
    """Full-frame stack of the held-out (test split) specimen."""
    root = tmp_path_factory.mktemp("teststack")
    cfg = dict(ARCHIVE_CONFIG)
    cfg.pop("dataset")
    cfg["phantom"] = dict(cfg["phantom"], seed=TEST_PHANTOM_SEED)
    path = root / "config.json"
    path.write_text(json.dumps(cfg))
    run_holoforge("simulate", "--config", str(path), "--out", str(root / "sim"))
    run_holoforge("reconstruct", "--stack", str(root / "sim" / "stack.json"),
                  "--out", str(root / "rec"), "--iterations", "30")
    return root


def metrics_ssim(image_path, reference_path, out_dir):
    """SSIM verdicts always come from the primary toolkit."""
    run_holoforge("metrics", "--image", str(image_path),
                  "--reference", str(reference_path), "--out", str(out_dir))
    with open(out_dir / "ssim.csv", newline="") as fh:
        lines = fh.read().splitlines()
    _, row = lines[0].split(","), lines[1].split(",")
    return float(row[2]), float(row[3])
