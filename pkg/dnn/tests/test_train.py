"""Training mechanics: capacity, determinism, NaN handling, archive splits."""

import numpy as np
import pytest
import torch

from holonet import (NetworkSpec, PairArchive, PairDataset, TrainConfig,
                     overfit_single_pair, train)
from holonet.train import write_history_csv

torch.set_num_threads(1)


class TestArchiveLoading:
    def test_splits_present_and_disjoint(self, archive_dir):
        archive = PairArchive(archive_dir)
        assert archive.splits() == {"train", "val", "test"}
        ids = [e["id"] for e in archive.entries()]
        assert len(ids) == len(set(ids))

    def test_pairs_become_two_channel_tensors(self, archive_dir):
        ds = PairDataset(PairArchive(archive_dir), "train")
        x, y = ds[0]
        assert x.shape[0] == 2 and y.shape[0] == 2
        assert x.dtype == torch.float32
        assert x.shape == y.shape

    def test_missing_split_rejected(self, archive_dir):
        with pytest.raises(ValueError):
            PairDataset(PairArchive(archive_dir), "holdout")


class TestTrainingLoop:
    def test_overfit_single_pair_100x(self, archive_dir):
        first, last = overfit_single_pair(PairArchive(archive_dir), steps=500)
        assert last < first / 100.0

    def test_deterministic_given_seed(self, archive_dir):
        archive = PairArchive(archive_dir)
        cfg = TrainConfig(batch_size=8, max_epochs=3, patience=3, seed=11)
        a = train(archive, NetworkSpec(16), cfg)
        b = train(archive, NetworkSpec(16), cfg)
        assert a.history == b.history
        for pa, pb in zip(a.model.parameters(), b.model.parameters()):
            assert torch.equal(pa, pb)

    def test_nan_validation_aborts_with_diagnostic(self, archive_dir):
        archive = PairArchive(archive_dir)
        cfg = TrainConfig(learning_rate=1e6, batch_size=8, max_epochs=5,
                          patience=5, seed=0)  # divergent on purpose
        with pytest.raises(RuntimeError, match="NaN"):
            train(archive, NetworkSpec(16), cfg)

    def test_history_csv_layout(self, tmp_path):
        write_history_csv(tmp_path / "loss.csv", [(0, 1.0, 2.0), (1, 0.5, 0.7)])
        lines = (tmp_path / "loss.csv").read_bytes().decode().splitlines()
        assert lines[0] == "epoch,train_loss,val_loss"
        assert len(lines) == 3

    def test_bad_config_rejected(self):
        with pytest.raises(ValueError):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            TrainConfig(batch_size=0)
