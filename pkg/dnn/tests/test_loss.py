"""Loss oracle and the finite-difference gradient check."""

import numpy as np
import pytest
import torch

from holonet import recovery_loss
from holonet.model import _conv

torch.set_num_threads(1)


def loss_bruteforce(output, target):
    """Elementwise re-evaluation: (1/2K) sum_k [mse_re(k) + mse_im(k)]."""
    out = np.asarray(output, dtype=np.float64)
    tgt = np.asarray(target, dtype=np.float64)
    k = out.shape[0]
    total = 0.0
    for i in range(k):
        for ch in range(2):
            diff = out[i, ch].ravel() - tgt[i, ch].ravel()
            total += sum(d * d for d in diff) / diff.size
    return total / (2.0 * k)


class TestRecoveryLoss:
    def test_identical_tensors_give_zero(self):
        x = torch.randn(2, 2, 8, 8)
        assert recovery_loss(x, x).item() == 0.0

    def test_unit_offset_2x2_single_patch(self):
        out = torch.ones(1, 2, 2, 2)
        tgt = torch.zeros(1, 2, 2, 2)
        assert recovery_loss(out, tgt).item() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_random_batches_match_bruteforce(self, seed):
        g = torch.Generator().manual_seed(seed)
        out = torch.randn(3, 2, 6, 5, generator=g, dtype=torch.float64)
        tgt = torch.randn(3, 2, 6, 5, generator=g, dtype=torch.float64)
        got = recovery_loss(out, tgt).item()
        assert got == pytest.approx(loss_bruteforce(out, tgt), abs=1e-6)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            recovery_loss(torch.zeros(1, 2, 4, 4), torch.zeros(1, 2, 4, 5))


class MicroNet(torch.nn.Module):
    """Two conv layers with a ReLU between; small enough for dense FD checks."""

    def __init__(self):
        super().__init__()
        self.conv1 = _conv(2, 4, 3)
        self.conv2 = _conv(4, 2, 3)

    def forward(self, x):
        return self.conv2(torch.relu(self.conv1(x)))


class TestGradientCheck:
    def test_analytic_matches_central_differences(self):
        torch.manual_seed(3)
        net = MicroNet().double()
        # bias the hidden layer away from the ReLU kink so the loss is locally
        # smooth over the +/- h probes
        with torch.no_grad():
            net.conv1.bias.fill_(1.0)
        x = torch.randn(1, 2, 10, 10, dtype=torch.float64)
        tgt = torch.randn(1, 2, 10, 10, dtype=torch.float64)

        loss = recovery_loss(net(x), tgt)
        loss.backward()
        weight = net.conv1.weight
        analytic = weight.grad[1, 0].clone()  # one 3x3 kernel slice

        h = 1e-3
        numeric = torch.zeros(3, 3, dtype=torch.float64)
        with torch.no_grad():
            for i in range(3):
                for j in range(3):
                    orig = weight[1, 0, i, j].item()
                    weight[1, 0, i, j] = orig + h
                    up = recovery_loss(net(x), tgt).item()
                    weight[1, 0, i, j] = orig - h
                    down = recovery_loss(net(x), tgt).item()
                    weight[1, 0, i, j] = orig
                    numeric[i, j] = (up - down) / (2.0 * h)

        rel = torch.linalg.vector_norm(analytic - numeric) \
            / torch.linalg.vector_norm(numeric)
        assert rel.item() < 1e-3
