"""Command-line interface: simulate, autofocus, psr, reconstruct, metrics,
export-training and sweep subcommands.

Every run writes its artifacts plus a provenance.json (tool version, config
hash, seed) into --out.  Outputs are deterministic for a fixed seed/config.
Exit codes: 0 ok, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, config, dataset, io, metrics, phantoms
from .autofocus import autofocus as run_autofocus
from .field import (ComplexField, NumericalError, OpticalConfig,
                    backpropagate_hologram, set_fft_workers)
from .forward import HologramStack, synthesize_stack
from .psr import ShiftedFrameSet, psr_fuse
from .retrieval import multiheight_recover

RENDER_CHANNELS = ("amplitude", "phase", "real", "imag")


def render_field(field: ComplexField, channel: str) -> np.ndarray:
    """8-bit grayscale rendering of one channel of a complex field.

    amplitude/real/imag are min-max scaled (degenerate range maps to 128);
    phase maps (-pi, pi] onto [0, 255].
    """
    if channel not in RENDER_CHANNELS:
        raise ValueError(f"channel must be one of {RENDER_CHANNELS}")
    if channel == "phase":
        v = (field.phase() + np.pi) / (2.0 * np.pi)
        return np.round(v * 255.0).astype(np.uint8)
    img = {"amplitude": field.amplitude(),
           "real": field.data.real.astype(np.float64),
           "imag": field.data.imag.astype(np.float64)}[channel]
    lo, hi = float(img.min()), float(img.max())
    if hi - lo < 1e-30:
        return np.full(img.shape, 128, dtype=np.uint8)
    return np.round((img - lo) / (hi - lo) * 255.0).astype(np.uint8)


def _optical(cfg: dict) -> tuple:
    o = cfg["optical"]
    return OpticalConfig(o["wavelength_um"], o["z2_um"], o.get("n0", 1.0)), o["pitch_um"]


def _provenance(out_dir, subcommand: str, cfg_hash: str, seed, artifacts: list):
    io.write_json(out_dir / "provenance.json", {
        "tool": "holoforge",
        "version": __version__,
        "subcommand": subcommand,
        "config_sha256": cfg_hash,
        "seed": seed,
        "artifacts": sorted(artifacts),
    })


def _load_stack(manifest_path) -> HologramStack:
    man = io.read_json(manifest_path)
    base = os.path.dirname(os.path.abspath(manifest_path))
    cfg = OpticalConfig(man["optical"]["wavelength_um"], man["optical"]["z2_um"],
                        man["optical"].get("n0", 1.0))
    planes = []
    for entry in man["planes"]:
        img = io.read_cfld(os.path.join(base, entry["cfld"])).real.astype(np.float64)
        planes.append((img, float(entry["z_um"])))
    return HologramStack(tuple(planes), cfg, man["optical"]["pitch_um"],
                         tuple(man.get("shift_um", (0.0, 0.0))))


def cmd_simulate(args) -> int:
    cfg = config.load(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out = io.ensure_dir(args.out)
    optical, pitch = _optical(cfg)
    ph_cfg = cfg["phantom"]
    phantom = phantoms.make_phantom(
        ph_cfg["kind"], ph_cfg["size"], pitch,
        seed=ph_cfg.get("seed", cfg["seed"]),
        target_scattering=ph_cfg.get("target_scattering"),
        **ph_cfg.get("params", {}))
    heights = [optical.z2_um + h for h in cfg["heights_um"]]
    noise = cfg.get("noise", {})
    stack = synthesize_stack(
        phantom, heights, optical, tuple(cfg["shift_um"]),
        photons=noise.get("photons"), read_noise=noise.get("read_noise", 0.0),
        rng=np.random.default_rng(cfg["seed"]))

    artifacts = ["truth.cfld", "stack.json"]
    io.write_cfld(out / "truth.cfld", phantom.transmission.data)
    entries = []
    for i, (img, z) in enumerate(stack.planes):
        name = f"plane_{i:02d}"
        io.write_cfld(out / f"{name}.cfld", img.astype(np.complex64))
        lo, hi = img.min(), img.max()
        scaled = np.zeros(img.shape, np.uint16) if hi - lo < 1e-30 else \
            np.round((img - lo) / (hi - lo) * 65535.0).astype(np.uint16)
        io.write_pgm(out / f"{name}.pgm", scaled, maxval=65535)
        entries.append({"cfld": f"{name}.cfld", "pgm": f"{name}.pgm", "z_um": z})
        artifacts += [f"{name}.cfld", f"{name}.pgm"]
    io.write_json(out / "stack.json", {
        "optical": {"wavelength_um": optical.wavelength_um, "z2_um": optical.z2_um,
                    "n0": optical.n0, "pitch_um": pitch},
        "shift_um": list(stack.shift_um),
        "planes": entries,
        "phantom_label": phantom.label,
    })
    _provenance(out, "simulate", config.config_hash(cfg), cfg["seed"], artifacts)
    print(f"simulate: {len(stack.planes)} planes of {ph_cfg['size']}^2 -> {out}")
    return 0


def cmd_autofocus(args) -> int:
    stack = _load_stack(args.stack)
    out = io.ensure_dir(args.out)
    intensity = stack.planes[args.plane][0]
    result = run_autofocus(intensity, stack.cfg, stack.pitch_um,
                           coarse=(args.coarse_min, args.coarse_max, args.coarse_step))
    io.write_csv(out / "autofocus.csv", ["z_um", "score"],
                 [[f"{z:.6f}", f"{s:.9e}"] for z, s in result.criterion_curve])
    io.write_json(out / "autofocus.json", {
        "z_best_um": result.z_best_um,
        "non_unimodal": result.non_unimodal,
        "refinement_probes": len(result.refinement_history),
        "final_bracket_um": list(result.refinement_history[-1])
        if result.refinement_history else None,
    })
    _provenance(out, "autofocus", io.sha256_file(args.stack), None,
                ["autofocus.csv", "autofocus.json"])
    print(f"autofocus: z_best = {result.z_best_um:.3f} um"
          + (" (non-unimodal; coarse argmin)" if result.non_unimodal else ""))
    return 0


def cmd_reconstruct(args) -> int:
    stack = _load_stack(args.stack)
    if args.nholo is not None:
        stack = stack.first(args.nholo)
    out = io.ensure_dir(args.out)
    if args.z2 == "auto":
        z2 = None  # multiheight_recover runs autofocus on the first plane
    elif args.z2 == "manifest":
        z2 = stack.cfg.z2_um
    else:
        z2 = float(args.z2)
    result = multiheight_recover(stack, iterations=args.iterations,
                                 use_tie=args.tie, z2_um=z2)
    io.write_cfld(out / "result.cfld", result.object_field.data)
    io.write_csv(out / "residuals.csv", ["iteration", "residual"],
                 [[i, f"{r:.9e}"] for i, r in enumerate(result.per_iteration_residual)])
    for channel in ("amplitude", "phase"):
        io.write_pgm(out / f"result_{channel}.pgm",
                     render_field(result.object_field, channel))
    _provenance(out, "reconstruct", io.sha256_file(args.stack), None,
                ["result.cfld", "residuals.csv", "result_amplitude.pgm",
                 "result_phase.pgm"])
    print(f"reconstruct: N_holo={len(stack.planes)} iterations={result.iterations_run} "
          f"z2={result.z2_um:.3f} residual={result.per_iteration_residual[-1]:.3e}")
    return 0


def cmd_psr(args) -> int:
    man = io.read_json(args.frames)
    base = os.path.dirname(os.path.abspath(args.frames))
    frames = tuple(
        (io.read_cfld(os.path.join(base, e["cfld"])).real.astype(np.float64),
         tuple(e["shift_um"]))
        for e in man["frames"])
    fset = ShiftedFrameSet(frames, man["lr_pitch_um"], args.factor)
    hr = psr_fuse(fset, deconvolve=args.deconvolve)
    out = io.ensure_dir(os.path.dirname(os.path.abspath(args.out)) or ".")
    lo, hi = hr.min(), hr.max()
    scaled = np.zeros(hr.shape, np.uint16) if hi - lo < 1e-30 else \
        np.round((hr - lo) / (hi - lo) * 65535.0).astype(np.uint16)
    io.write_pgm(args.out, scaled, maxval=65535)
    cfld_path = os.path.splitext(args.out)[0] + ".cfld"
    io.write_cfld(cfld_path, hr.astype(np.complex64))
    _provenance(out, "psr", io.sha256_file(args.frames), None,
                [os.path.basename(args.out), os.path.basename(cfld_path)])
    print(f"psr: {len(frames)} frames -> {hr.shape[1]}x{hr.shape[0]} at "
          f"{man['lr_pitch_um'] / args.factor:.3f} um")
    return 0


def cmd_metrics(args) -> int:
    out = io.ensure_dir(args.out)
    artifacts = []
    if args.image:
        recon = io.read_cfld(args.image)
        ref = io.read_cfld(args.reference)
        s_re, s_im = metrics.ssim_pair(recon, ref)
        io.write_csv(out / "ssim.csv",
                     ["image", "reference", "ssim_real", "ssim_imag"],
                     [[os.path.basename(args.image), os.path.basename(args.reference),
                       f"{s_re:.6f}", f"{s_im:.6f}"]])
        artifacts.append("ssim.csv")
        print(f"metrics: ssim_real={s_re:.4f} ssim_imag={s_im:.4f}")
    if args.cells_from:
        field_data = io.read_cfld(args.cells_from)
        man = io.read_json(args.cells_config) if args.cells_config else {}
        wavelength = man.get("wavelength_um", 0.53)
        pitch = man.get("pitch_um", 1.12)
        cells = metrics.measure_cells(np.angle(field_data), pitch, wavelength,
                                      args.threshold)
        io.write_csv(out / "cells.csv",
                     ["cell_id", "area_um2", "phase_integral_rad_um2",
                      "effective_volume_fl"],
                     [[c.cell_id, f"{c.area_um2:.4f}", f"{c.phase_integral:.6f}",
                       f"{c.effective_volume_fl:.6f}"] for c in cells])
        artifacts.append("cells.csv")
        print(f"metrics: {len(cells)} cells -> cells.csv")
    if not artifacts:
        raise config.ConfigError("metrics: need --image/--reference or --cells-from")
    _provenance(out, "metrics", "-", None, artifacts)
    return 0


def cmd_export_training(args) -> int:
    cfg = config.load(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if "dataset" not in cfg:
        raise config.ConfigError("export-training requires a 'dataset' section")
    ds = cfg["dataset"]
    out = io.ensure_dir(args.out)
    optical, pitch = _optical(cfg)
    ph_cfg = cfg["phantom"]
    heights = [optical.z2_um + h for h in cfg["heights_um"]]
    specimens = [
        phantoms.make_phantom(ph_cfg["kind"], ph_cfg["size"], pitch,
                              seed=cfg["seed"] + i,
                              target_scattering=ph_cfg.get("target_scattering"),
                              **ph_cfg.get("params", {}))
        for i in range(ds["num_phantoms"])]
    archive = dataset.make_pairs(
        specimens, optical, heights, out,
        tile=(ds.get("tiles_per_side", 1), ds.get("overlap_px", 0)),
        iterations=ds.get("iterations", 50))
    _provenance(out, "export-training", config.config_hash(cfg), cfg["seed"],
                ["manifest.json"])
    counts = {s: len(archive.pairs(s)) for s in ("train", "val", "test")}
    print(f"export-training: {len(archive.pairs())} pairs "
          f"(train/val/test = {counts['train']}/{counts['val']}/{counts['test']}) -> {out}")
    return 0


def cmd_sweep(args) -> int:
    stack = _load_stack(args.stack)
    out = io.ensure_dir(args.out)
    hologram = stack.planes[0][0]
    sweep = dataset.defocus_sweep(hologram, stack.cfg, stack.pitch_um,
                                  (args.dz_min, args.dz_max), args.step)
    focused = next(f for dz, f in sweep if dz == 0.0)
    rows = []
    artifacts = ["sweep.csv"]
    for dz, f in sweep:
        s_re, s_im = metrics.ssim_pair(f.data, focused.data)
        rows.append([f"{dz:.3f}", f"{s_re:.6f}", f"{s_im:.6f}"])
        if args.export_fields:
            name = f"input_dz{dz:+06.1f}.cfld"
            io.write_cfld(out / name, f.data)
            artifacts.append(name)
    io.write_csv(out / "sweep.csv", ["dz_um", "ssim_real", "ssim_imag"], rows)
    _provenance(out, "sweep", io.sha256_file(args.stack), None, artifacts)
    print(f"sweep: {len(sweep)} defocus planes -> {out / 'sweep.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holoforge",
        description="Lensfree in-line holography simulation and reconstruction")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--threads", type=int, default=None,
                        help="FFT worker threads (default $HOLOFORGE_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize a hologram stack from a phantom")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("autofocus", help="estimate the sample-to-sensor distance")
    p.add_argument("--stack", required=True, help="stack manifest JSON")
    p.add_argument("--plane", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--coarse-min", type=float, default=100.0)
    p.add_argument("--coarse-max", type=float, default=800.0)
    p.add_argument("--coarse-step", type=float, default=10.0)
    p.set_defaults(func=cmd_autofocus)

    p = sub.add_parser("reconstruct", help="multi-height phase recovery")
    p.add_argument("--stack", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--iterations", type=int, default=50)
    p.add_argument("--nholo", type=int, default=None, help="use first K planes")
    p.add_argument("--tie", dest="tie", action="store_true", default=True)
    p.add_argument("--no-tie", dest="tie", action="store_false")
    p.add_argument("--z2", default="manifest",
                   help="sample distance in um, 'manifest' (declared geometry, "
                        "default) or 'auto' (magnitude-differential autofocus; "
                        "suited to amplitude-contrast specimens)")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("psr", help="pixel super-resolution fusion")
    p.add_argument("--frames", required=True, help="frames manifest JSON")
    p.add_argument("--factor", type=int, default=3)
    p.add_argument("--out", required=True, help="output PGM path")
    p.add_argument("--deconvolve", action="store_true")
    p.set_defaults(func=cmd_psr)

    p = sub.add_parser("metrics", help="SSIM pairs and per-cell tables")
    p.add_argument("--image", default=None, help="reconstruction CFLD")
    p.add_argument("--reference", default=None, help="reference CFLD")
    p.add_argument("--cells-from", default=None, help="CFLD for per-cell table")
    p.add_argument("--cells-config", default=None,
                   help="JSON with wavelength_um/pitch_um for cell metrics")
    p.add_argument("--threshold", type=float, default=0.5,
                   help="segmentation phase threshold, rad")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("export-training", help="write a training-pair archive")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_export_training)

    p = sub.add_parser("sweep", help="defocus sweep of network inputs")
    p.add_argument("--stack", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dz-min", type=float, default=-20.0)
    p.add_argument("--dz-max", type=float, default=20.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--export-fields", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = args.threads
    if threads is None:
        try:
            threads = int(os.environ.get("HOLOFORGE_THREADS", "1"))
        except ValueError:
            print("warning: ignoring non-numeric HOLOFORGE_THREADS", file=sys.stderr)
            threads = 1
    set_fft_workers(threads)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (config.ConfigError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
