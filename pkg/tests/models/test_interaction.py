import numpy as np
import pytest
import torch

from egiinet.models.interaction import (
    DEFAULT_ALPHA,
    LossBundle,
    chamfer_l1_loss,
    gram,
    loss_direct_infor,
    loss_infor,
    loss_stc,
    loss_total,
    loss_transfer,
)
from egiinet.utils.geometry import chamfer_l1


def randn(*shape: int, seed: int = 0) -> torch.Tensor:
    return torch.randn(*shape, dtype=torch.float64, generator=torch.Generator().manual_seed(seed))


def loop_gram_gap(a: np.ndarray, b: np.ndarray) -> float:
    n, c = a.shape
    total = 0.0
    for i in range(c):
        for j in range(c):
            ga = sum(a[k, i] * a[k, j] for k in range(n))
            gb = sum(b[k, i] * b[k, j] for k in range(n))
            total += (ga - gb) ** 2
    return total / (n * c)


class TestGram:
    def test_identity(self) -> None:
        assert torch.equal(gram(torch.eye(2)), torch.eye(2))

    def test_symmetric_psd(self) -> None:
        g = gram(randn(2, 8, 6))
        assert g.shape == (2, 6, 6)
        assert torch.allclose(g, g.transpose(-2, -1), atol=1e-6)
        assert torch.all(torch.linalg.eigvalsh(g) >= -1e-6)


class TestLossInfor:
    def test_matches_loop_oracle(self) -> None:
        f = [randn(5, 4, seed=s) for s in range(4)]
        expected = loop_gram_gap(f[0].numpy(), f[3].numpy()) + loop_gram_gap(f[1].numpy(), f[2].numpy())
        assert loss_infor(*f).item() == pytest.approx(expected, abs=1e-6)

    def test_matched_grams(self) -> None:
        f_img_stc, f_pc_stc = randn(6, 4, seed=1), randn(6, 4, seed=2)
        q, _ = torch.linalg.qr(randn(6, 6, seed=3))
        # rotating token rows leaves the Gram matrix unchanged
        assert loss_infor(f_img_stc, f_pc_stc, q @ f_pc_stc, q @ f_img_stc).item() == pytest.approx(0.0, abs=1e-6)

    def test_zeros(self) -> None:
        z = torch.zeros(2, 8, 16)
        assert loss_infor(z, z, z, z).item() == 0.0

    def test_pair_swap_symmetry(self) -> None:
        a, b, c, d = (randn(2, 6, 4, seed=s) for s in range(4))
        assert torch.allclose(loss_infor(a, b, c, d), loss_infor(b, a, d, c))

    def test_row_permutation_invariant(self) -> None:
        f = [randn(2, 6, 4, seed=s) for s in range(4)]
        permuted = [x[:, torch.randperm(6)] for x in f]
        assert torch.allclose(loss_infor(*f), loss_infor(*permuted))

    def test_batch_mean(self) -> None:
        f = [randn(3, 6, 4, seed=s) for s in range(4)]
        per_sample = [loss_infor(*(x[i] for x in f)) for i in range(3)]
        assert torch.allclose(loss_infor(*f), torch.stack(per_sample).mean())

    def test_shape_mismatch(self) -> None:
        with pytest.raises(ValueError, match=r"Shape mismatch between token features"):
            loss_infor(randn(6, 4), randn(6, 4), randn(6, 4), randn(5, 4))

    def test_direct(self) -> None:
        a, b = randn(5, 4, seed=7), randn(5, 4, seed=8)
        assert loss_direct_infor(a, b).item() == pytest.approx(loop_gram_gap(a.numpy(), b.numpy()), abs=1e-6)


class TestLossStc:
    def test_identical(self) -> None:
        f = randn(8, 16)
        assert loss_stc(f, f.clone()).item() == 0.0

    def test_zeros_vs_ones(self) -> None:
        assert loss_stc(torch.zeros(8, 16), torch.ones(8, 16)).item() == 1.0

    def test_matches_loop_oracle(self) -> None:
        a, b = randn(2, 5, 3, seed=1), randn(2, 5, 3, seed=2)
        diffs = [(x - y) ** 2 for x, y in zip(a.flatten().tolist(), b.flatten().tolist())]
        assert loss_stc(a, b).item() == pytest.approx(sum(diffs) / len(diffs), abs=1e-9)

    def test_shape_mismatch(self) -> None:
        with pytest.raises(ValueError, match=r"Shape mismatch"):
            loss_stc(randn(8, 16), randn(8, 15))

    def test_fit_drives_gap_to_zero(self) -> None:
        frozen = randn(8, 16, seed=3)
        f_out = torch.zeros(8, 16, dtype=torch.float64, requires_grad=True)
        optimizer = torch.optim.SGD([f_out], lr=10.0)
        history = list()
        for _ in range(100):
            optimizer.zero_grad()
            loss = loss_stc(frozen, f_out)
            loss.backward()
            optimizer.step()
            history.append(loss.item())
        assert all(later <= earlier for earlier, later in zip(history, history[1:]))
        assert history[-1] < 1e-8 * history[0]
        assert torch.allclose(f_out.detach(), frozen, atol=1e-6)


class TestLossComposition:
    def test_transfer(self) -> None:
        assert loss_transfer(torch.tensor(0.3), torch.tensor(0.2)).item() == pytest.approx(0.5)
        assert loss_transfer(torch.tensor(0.0), torch.tensor(0.0)).item() == 0.0

    def test_transfer_recomputed(self) -> None:
        f = [randn(6, 4, seed=s) for s in range(4)]
        l_infor, l_stc = loss_infor(*f), loss_stc(f[1], f[3])
        expected = loop_gram_gap(f[0].numpy(), f[3].numpy()) + loop_gram_gap(f[1].numpy(), f[2].numpy())
        expected += float(np.mean((f[1].numpy() - f[3].numpy()) ** 2))
        assert loss_transfer(l_infor, l_stc).item() == pytest.approx(expected, abs=1e-6)

    def test_total(self) -> None:
        assert DEFAULT_ALPHA == 0.01
        assert loss_total(torch.tensor(2.0), torch.tensor(0.5), 0.01).item() == pytest.approx(0.52)
        assert loss_total(torch.tensor(0.0), torch.tensor(0.5)).item() == 0.5

    @pytest.mark.parametrize("alpha", [0.0, -0.1])
    def test_total_bad_alpha(self, alpha: float) -> None:
        with pytest.raises(ValueError, match=r"invalid alpha"):
            loss_total(torch.tensor(1.0), torch.tensor(1.0), alpha)

    def test_bundle_floats(self) -> None:
        t = torch.tensor
        bundle = LossBundle(t(0.3), t(0.2), t(0.5), t(0.1), t(0.105))
        assert bundle.as_floats() == pytest.approx(
            {"l_infor": 0.3, "l_stc": 0.2, "l_transfer": 0.5, "l_l1cd": 0.1, "l_total": 0.105}
        )


class TestChamferL1Loss:
    def test_matches_geometry(self) -> None:
        pred, target = randn(3, 20, 3, seed=1), randn(3, 30, 3, seed=2)
        expected = np.mean([chamfer_l1(p.numpy(), t.numpy()) for p, t in zip(pred, target)])
        assert chamfer_l1_loss(pred, target).item() == pytest.approx(expected, abs=1e-6)

    def test_identical_is_zero(self) -> None:
        cloud = randn(1, 16, 3)
        assert chamfer_l1_loss(cloud, cloud.clone()).item() == pytest.approx(0.0, abs=1e-6)

    def test_finite_gradient_at_coincidence(self) -> None:
        cloud = randn(1, 16, 3).requires_grad_(True)
        chamfer_l1_loss(cloud, cloud.detach().clone()).backward()
        assert torch.all(torch.isfinite(cloud.grad))
