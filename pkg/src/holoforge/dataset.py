"""Training-pair export: tiled (single-shot input, multi-height target) fields.

For every phantom the first hologram's back-propagation (artifact-laden) is
paired with the full multi-height reconstruction (gold standard); both are cut
into an n x n grid of overlapping tiles and written as CFLD files under a
manifest with per-file content hashes.  Phantoms are assigned whole to one of
train/val/test (4:1:1) so no specimen leaks across splits.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .field import ComplexField, OpticalConfig, backpropagate_hologram, propagate
from .forward import HologramStack, Phantom, synthesize_stack
from .retrieval import multiheight_recover

SPLIT_CYCLE = ("train", "train", "train", "train", "val", "test")
ARCHIVE_VERSION = 1


def tile_grid(shape: tuple, per_side: int, overlap_px: int) -> list:
    """Tile origins and size for an exact n x n cover with the given overlap.

    n tiles of side T with overlap o must satisfy n*T - (n-1)*o == image side
    exactly; anything else would push tiles out of bounds.
    Returns [(row0, col0, tile_h, tile_w), ...] in row-major order.
    """
    rows, cols = shape
    if per_side < 1:
        raise ValueError("tiles per side must be >= 1")
    out_hw = []
    for side in (rows, cols):
        total = side + (per_side - 1) * overlap_px
        if total % per_side:
            raise ValueError(
                f"{per_side} tiles with overlap {overlap_px} do not cover a "
                f"side of {side} px exactly")
        tile = total // per_side
        if tile <= overlap_px and per_side > 1:
            raise ValueError("overlap must be smaller than the tile side")
        out_hw.append(tile)
    tile_h, tile_w = out_hw
    step_r, step_c = tile_h - overlap_px, tile_w - overlap_px
    tiles = []
    for i in range(per_side):
        for j in range(per_side):
            tiles.append((i * step_r, j * step_c, tile_h, tile_w))
    return tiles


def cut_tiles(img: np.ndarray, tiles: list) -> list:
    return [img[r0:r0 + th, c0:c0 + tw].copy() for r0, c0, th, tw in tiles]


def reassemble_tiles(tiles_data: list, tiles: list, shape: tuple,
                     per_side: int, overlap_px: int) -> np.ndarray:
    """Rebuild the source image from overlapping tiles, bit-exactly.

    Each tile contributes its core region; overlap strips are split midway
    between neighbours.
    """
    out = np.zeros(shape, dtype=tiles_data[0].dtype)
    half = overlap_px - overlap_px // 2  # leading neighbour keeps floor(o/2)
    for (data, (r0, c0, th, tw)) in zip(tiles_data, tiles):
        i, j = r0 // max(th - overlap_px, 1), c0 // max(tw - overlap_px, 1)
        rs = 0 if i == 0 else half
        cs = 0 if j == 0 else half
        re = th if i == per_side - 1 else th - overlap_px + half
        ce = tw if j == per_side - 1 else tw - overlap_px + half
        out[r0 + rs:r0 + re, c0 + cs:c0 + ce] = data[rs:re, cs:ce]
    return out


@dataclass(frozen=True, eq=False)
class TrainingPairArchive:
    """On-disk set of (input, target) complex tiles plus its manifest."""

    root: Path
    manifest: dict

    @classmethod
    def load(cls, root) -> "TrainingPairArchive":
        root = Path(root)
        manifest = io.read_json(root / "manifest.json")
        return cls(root, manifest)

    def pairs(self, split: str | None = None) -> list:
        items = self.manifest["pairs"]
        if split is not None:
            items = [p for p in items if p["split"] == split]
        return items

    def read_pair(self, entry: dict) -> tuple:
        return (io.read_cfld(self.root / entry["input"]),
                io.read_cfld(self.root / entry["target"]))

    def verify_hashes(self) -> bool:
        for p in self.manifest["pairs"]:
            for key in ("input", "target"):
                if io.sha256_file(self.root / p[key]) != p[f"{key}_sha256"]:
                    return False
        return True


def split_for_index(i: int) -> str:
    return SPLIT_CYCLE[i % len(SPLIT_CYCLE)]


def make_pairs(phantoms: list, cfg: OpticalConfig, heights_um, out_dir,
               tile: tuple = (1, 0), iterations: int = 50,
               use_tie: bool = True) -> TrainingPairArchive:
    """Build a TrainingPairArchive from phantoms (>= 1 required).

    tile = (tiles per side, overlap in pixels).  Inputs are back-propagated
    first holograms, targets the multi-height reconstruction over all heights;
    both are tiled identically.
    """
    if not phantoms:
        raise ValueError("need at least one phantom")
    per_side, overlap_px = tile
    root = io.ensure_dir(out_dir)
    pairs = []
    tile_hw = None
    for idx, phantom in enumerate(phantoms):
        stack = synthesize_stack(phantom, heights_um, cfg)
        input_full = backpropagate_hologram(stack.planes[0][0], cfg, stack.pitch_um)
        target_full = multiheight_recover(stack, iterations=iterations,
                                          use_tie=use_tie, z2_um=cfg.z2_um)
        tiles = tile_grid(input_full.data.shape, per_side, overlap_px)
        tile_hw = (tiles[0][2], tiles[0][3])
        split = split_for_index(idx)
        in_tiles = cut_tiles(input_full.data, tiles)
        tg_tiles = cut_tiles(target_full.object_field.data, tiles)
        for t_idx, ((r0, c0, th, tw), tin, ttg) in enumerate(zip(tiles, in_tiles, tg_tiles)):
            pair_id = f"{idx:04d}_{t_idx:03d}"
            in_name = f"pair_{pair_id}_input.cfld"
            tg_name = f"pair_{pair_id}_target.cfld"
            io.write_cfld(root / in_name, tin)
            io.write_cfld(root / tg_name, ttg)
            pairs.append({
                "id": pair_id,
                "phantom": idx,
                "label": phantom.label,
                "split": split,
                "row0": r0, "col0": c0,
                "input": in_name, "target": tg_name,
                "input_sha256": io.sha256_file(root / in_name),
                "target_sha256": io.sha256_file(root / tg_name),
            })
    manifest = {
        "version": ARCHIVE_VERSION,
        "tile": {"per_side": per_side, "overlap_px": overlap_px,
                 "tile_height": tile_hw[0], "tile_width": tile_hw[1]},
        "optical": {"wavelength_um": cfg.wavelength_um, "z2_um": cfg.z2_um,
                    "n0": cfg.n0, "pitch_um": phantoms[0].transmission.pitch_um},
        "heights_um": [float(z) for z in heights_um],
        "iterations": iterations,
        "pairs": pairs,
    }
    io.write_json(root / "manifest.json", manifest)
    return TrainingPairArchive(root, manifest)


def defocus_sweep(hologram: np.ndarray, cfg: OpticalConfig, pitch_um: float,
                  dz_range_um: tuple = (-20.0, 20.0), step_um: float = 1.0) -> list:
    """Back-propagated inputs at z2 + dz for dz over the range, inclusive.

    The dz = 0 element equals the plain single-shot back-propagation; the list
    feeds a fixed network to probe its defocus tolerance.
    """
    if step_um <= 0.0:
        raise ValueError("step must be positive")
    lo, hi = dz_range_um
    n_steps = int(round((hi - lo) / step_um))
    out = []
    for i in range(n_steps + 1):
        dz = lo + i * step_um
        shifted_cfg = OpticalConfig(cfg.wavelength_um, cfg.z2_um + dz, cfg.n0)
        out.append((dz, backpropagate_hologram(hologram, shifted_cfg, pitch_um)))
    return out
