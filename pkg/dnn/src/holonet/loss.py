"""Training objective: average of the real- and imaginary-part MSEs.

For a mini-batch of K patches,
    loss = (1 / 2K) * sum_k [ mean((out_re - gt_re)^2) + mean((out_im - gt_im)^2) ]
where each mean runs over the patch pixels.
"""

import torch


def recovery_loss(output: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    if output.shape != target.shape:
        raise ValueError(f"shape mismatch: {tuple(output.shape)} vs {tuple(target.shape)}")
    if output.shape[1] != 2:
        raise ValueError("expected 2 channels (real, imaginary)")
    se = (output - target) ** 2
    per_channel_mse = se.mean(dim=(-2, -1))  # (K, 2)
    return 0.5 * per_channel_mse.sum(dim=1).mean()
