"""holonet command line: train on an archive, infer on CFLD fields."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import torch

from . import checkpoint
from .archive import PairArchive
from .infer import infer_file
from .model import NetworkSpec
from .train import TrainConfig, train, write_history_csv


def cmd_train(args) -> int:
    torch.set_num_threads(args.threads)
    archive = PairArchive(args.archive)
    spec = NetworkSpec(features=args.features)
    cfg = TrainConfig(learning_rate=args.lr, batch_size=args.batch,
                      max_epochs=args.epochs, patience=args.patience,
                      seed=args.seed)
    result = train(archive, spec, cfg, log=print)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    checkpoint.save(out, result.model,
                    extra={"best_epoch": result.best_epoch,
                           "best_val_loss": result.best_val_loss,
                           "seed": cfg.seed})
    write_history_csv(out.with_suffix(".loss.csv"), result.history)
    print(f"train: best epoch {result.best_epoch} "
          f"(val loss {result.best_val_loss:.5f}) -> {out}")
    return 0


def cmd_infer(args) -> int:
    torch.set_num_threads(args.threads)
    model = checkpoint.load(args.model)
    for path in args.inputs:
        src = Path(path)
        dst = Path(args.out) / (src.stem + "_net.cfld") if len(args.inputs) > 1 \
            else Path(args.out)
        dst.parent.mkdir(parents=True, exist_ok=True)
        infer_file(model, src, dst)
        print(f"infer: {src} -> {dst}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holonet",
        description="Single-shot holographic reconstruction network")
    parser.add_argument("--threads", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on a holoforge training archive")
    p.add_argument("--archive", required=True)
    p.add_argument("--out", required=True, help="checkpoint path (.hfnc)")
    p.add_argument("--features", type=int, default=16,
                   help="feature maps per conv layer (32 = universal)")
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--batch", type=int, default=8)
    p.add_argument("--epochs", type=int, default=60)
    p.add_argument("--patience", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("infer", help="reconstruct CFLD fields")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True,
                   help="output CFLD path (or directory for many inputs)")
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=cmd_infer)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
