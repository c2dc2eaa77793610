"""Training loop: ADAM at 1e-4, early stop on the validation loss.

Training stops once the validation loss has not improved for `patience`
epochs (or at max_epochs); the returned checkpoint is from the best
validation epoch.  Runs are deterministic for a fixed seed.
"""

from __future__ import annotations

import copy
import csv
import math
from dataclasses import dataclass

import torch
from torch.utils.data import DataLoader

from .archive import PairArchive, PairDataset
from .loss import recovery_loss
from .model import NetworkSpec, PhaseRecoveryNet


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    batch_size: int = 8
    max_epochs: int = 60
    patience: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise ValueError("learning rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")


@dataclass
class TrainResult:
    model: PhaseRecoveryNet
    best_epoch: int
    best_val_loss: float
    history: list  # (epoch, train_loss, val_loss)


def _epoch_loss(model, loader) -> float:
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for x, y in loader:
            total += recovery_loss(model(x), y).item() * x.shape[0]
            count += x.shape[0]
    return total / count


def train(archive: PairArchive, spec: NetworkSpec | None = None,
          cfg: TrainConfig | None = None, log=None) -> TrainResult:
    cfg = cfg or TrainConfig()
    torch.manual_seed(cfg.seed)
    model = PhaseRecoveryNet(spec or NetworkSpec())

    generator = torch.Generator().manual_seed(cfg.seed)
    train_loader = DataLoader(PairDataset(archive, "train"),
                              batch_size=cfg.batch_size, shuffle=True,
                              generator=generator)
    val_loader = DataLoader(PairDataset(archive, "val"),
                            batch_size=cfg.batch_size)

    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    history = []
    best_val = math.inf
    best_epoch = -1
    best_state = None
    since_best = 0

    for epoch in range(cfg.max_epochs):
        model.train()
        total, count = 0.0, 0
        for x, y in train_loader:
            optimizer.zero_grad()
            loss = recovery_loss(model(x), y)
            loss.backward()
            optimizer.step()
            total += loss.item() * x.shape[0]
            count += x.shape[0]
        train_loss = total / count
        val_loss = _epoch_loss(model, val_loader)
        if math.isnan(val_loss) or math.isnan(train_loss):
            raise RuntimeError(
                f"validation loss became NaN at epoch {epoch}; "
                f"last train loss {train_loss:.3e}, lr {cfg.learning_rate:g}")
        history.append((epoch, train_loss, val_loss))
        if log:
            log(f"epoch {epoch:3d}  train {train_loss:.5f}  val {val_loss:.5f}")
        if val_loss < best_val:
            best_val, best_epoch = val_loss, epoch
            best_state = copy.deepcopy(model.state_dict())
            since_best = 0
        else:
            since_best += 1
            if since_best >= cfg.patience:
                break

    model.load_state_dict(best_state)
    model.eval()
    return TrainResult(model, best_epoch, best_val, history)


def write_history_csv(path, history) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(["epoch", "train_loss", "val_loss"])
        for epoch, tr, va in history:
            writer.writerow([epoch, f"{tr:.9e}", f"{va:.9e}"])


def overfit_single_pair(archive: PairArchive, steps: int = 500,
                        spec: NetworkSpec | None = None, seed: int = 0) -> tuple:
    """Fit one training pair; returns (first_loss, last_loss). Sanity check."""
    torch.manual_seed(seed)
    model = PhaseRecoveryNet(spec or NetworkSpec())
    x, y = PairDataset(archive, "train")[0]
    x, y = x[None], y[None]
    optimizer = torch.optim.Adam(model.parameters(), lr=1e-4)
    first = last = None
    for _ in range(steps):
        optimizer.zero_grad()
        loss = recovery_loss(model(x), y)
        loss.backward()
        optimizer.step()
        last = loss.item()
        if first is None:
            first = last
    return first, last
