"""Multi-scale residual network for single-shot holographic phase recovery.

The two input channels (real/imaginary parts of a back-propagated hologram)
feed four parallel paths working at full, half, quarter and eighth
resolution.  Each path applies an input convolution, average-pool
downsampling, four residual blocks, and learned 2x upsampling stages
(conv to 4x channels, ReLU, depth-to-space) back to full resolution; the four
16-channel outputs are concatenated and projected to the two output channels.
All convolutions are 3x3 with same padding and ReLU activations.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import torch
from torch import nn

MIN_INPUT_SIDE = 16
PAD_MULTIPLE = 8


@dataclass(frozen=True)
class NetworkSpec:
    """Topology knobs; features=16 is the sample-specific size, 32 universal."""

    features: int = 16
    in_channels: int = 2
    out_channels: int = 2
    scales: tuple = (1, 2, 4, 8)
    blocks_per_scale: int = 4
    kernel_size: int = 3

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scales"] = list(self.scales)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkSpec":
        d = dict(d)
        d["scales"] = tuple(d["scales"])
        return cls(**d)


def truncated_normal_(tensor: torch.Tensor, std: float = 0.05) -> None:
    """Truncated normal init: resample draws outside +/- 2 std."""
    nn.init.trunc_normal_(tensor, mean=0.0, std=std, a=-2.0 * std, b=2.0 * std)


def _conv(cin: int, cout: int, k: int) -> nn.Conv2d:
    conv = nn.Conv2d(cin, cout, k, padding=k // 2)
    truncated_normal_(conv.weight)
    nn.init.zeros_(conv.bias)
    return conv


class ResidualBlock(nn.Module):
    """Two convolutions and two ReLUs with an input-to-output shortcut."""

    def __init__(self, channels: int, k: int):
        super().__init__()
        self.conv1 = _conv(channels, channels, k)
        self.conv2 = _conv(channels, channels, k)

    def forward(self, x):
        h = self.conv2(torch.relu(self.conv1(x)))
        return torch.relu(x + h)


class UpsampleBlock(nn.Module):
    """Conv to 4x channels, ReLU, then depth-to-space to 2x resolution."""

    def __init__(self, channels: int, k: int):
        super().__init__()
        self.conv = _conv(channels, 4 * channels, k)
        self.shuffle = nn.PixelShuffle(2)

    def forward(self, x):
        return self.shuffle(torch.relu(self.conv(x)))


class ScalePath(nn.Module):
    def __init__(self, spec: NetworkSpec, scale: int):
        super().__init__()
        self.scale = scale
        f, k = spec.features, spec.kernel_size
        self.entry = _conv(spec.in_channels, f, k)
        self.pool = nn.AvgPool2d(scale) if scale > 1 else nn.Identity()
        self.blocks = nn.Sequential(
            *[ResidualBlock(f, k) for _ in range(spec.blocks_per_scale)])
        ups = []
        s = scale
        while s > 1:
            ups.append(UpsampleBlock(f, k))
            s //= 2
        self.upsample = nn.Sequential(*ups)

    def forward(self, x):
        h = self.pool(torch.relu(self.entry(x)))
        h = self.blocks(h)
        return self.upsample(h)


class PhaseRecoveryNet(nn.Module):
    """Maps a 2-channel back-propagated field to its artifact-free version."""

    def __init__(self, spec: NetworkSpec | None = None):
        super().__init__()
        self.spec = spec or NetworkSpec()
        self.paths = nn.ModuleList(
            [ScalePath(self.spec, s) for s in self.spec.scales])
        self.head = _conv(self.spec.features * len(self.spec.scales),
                          self.spec.out_channels, self.spec.kernel_size)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim != 4 or x.shape[1] != self.spec.in_channels:
            raise ValueError(
                f"expected (batch, {self.spec.in_channels}, H, W) input")
        h_in, w_in = x.shape[-2:]
        if h_in < MIN_INPUT_SIDE or w_in < MIN_INPUT_SIDE:
            raise ValueError(f"input must be at least {MIN_INPUT_SIDE} px per side")
        pad_h = (-h_in) % PAD_MULTIPLE
        pad_w = (-w_in) % PAD_MULTIPLE
        if pad_h or pad_w:
            x = nn.functional.pad(x, (0, pad_w, 0, pad_h))
        out = self.head(torch.cat([path(x) for path in self.paths], dim=1))
        return out[..., :h_in, :w_in]

    def feature_shapes(self, h: int, w: int) -> dict:
        """Spatial size of each scale path's residual-block features."""
        return {s: (h // s, w // s) for s in self.spec.scales}


def parameter_count(spec: NetworkSpec) -> int:
    model = PhaseRecoveryNet(spec)
    return sum(p.numel() for p in model.parameters())
