"""Feature transfer losses that supervise the indirect exchange between image and point cloud tokens.

Token features are (B, N', C') tensors; a bare (N', C') matrix is treated as a batch of one.
Every loss is averaged over the batch.
"""

from dataclasses import dataclass

import torch

DEFAULT_ALPHA = 0.01


def _batched(f: torch.Tensor, name: str) -> torch.Tensor:
    if f.dim() == 2:
        return f.unsqueeze(0)
    if f.dim() != 3:
        raise ValueError(f"{name} invalid shape ({tuple(f.shape)}). Must be (N, C) or (B, N, C)")
    return f


def _check_same_shape(**features: torch.Tensor) -> None:
    shapes = {name: tuple(f.shape) for name, f in features.items()}
    if len(set(shapes.values())) != 1:
        raise ValueError(f"Shape mismatch between token features {shapes}")


def gram(f: torch.Tensor) -> torch.Tensor:
    """Channel co-activation matrix ``F^T F``.

    >>> gram(torch.tensor([[1.0, 2.0], [3.0, 4.0]]))
    tensor([[10., 14.],
            [14., 20.]])
    """
    return f.transpose(-2, -1) @ f


def _gram_gap(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    """Per-sample sum of squared Gram differences, divided by N'·C'."""
    _, N, C = a.shape
    return ((gram(a) - gram(b)) ** 2).sum(dim=(-2, -1)) / (N * C)


def loss_infor(
    f_img_stc: torch.Tensor,
    f_pc_stc: torch.Tensor,
    f_img_out: torch.Tensor,
    f_pc_out: torch.Tensor,
) -> torch.Tensor:
    """Cross-modal structure loss.

    Each modality's transferred features are pulled towards the Gram matrix of the other
    modality's extracted features.
    """
    _check_same_shape(f_img_stc=f_img_stc, f_pc_stc=f_pc_stc, f_img_out=f_img_out, f_pc_out=f_pc_out)
    f_img_stc, f_pc_stc, f_img_out, f_pc_out = (
        _batched(f, "loss_infor") for f in (f_img_stc, f_pc_stc, f_img_out, f_pc_out)
    )
    return (_gram_gap(f_img_stc, f_pc_out) + _gram_gap(f_pc_stc, f_img_out)).mean()


def loss_stc(f_pc_stc: torch.Tensor, f_pc_out: torch.Tensor) -> torch.Tensor:
    """Mean squared change of the point cloud features across the transfer network."""
    _check_same_shape(f_pc_stc=f_pc_stc, f_pc_out=f_pc_out)
    return ((f_pc_stc - f_pc_out) ** 2).mean()


def loss_direct_infor(f_img_stc: torch.Tensor, f_pc_stc: torch.Tensor) -> torch.Tensor:
    """Gram alignment applied straight to the extracted features, used when no transfer network exists."""
    _check_same_shape(f_img_stc=f_img_stc, f_pc_stc=f_pc_stc)
    return _gram_gap(_batched(f_img_stc, "loss_direct_infor"), _batched(f_pc_stc, "loss_direct_infor")).mean()


def loss_transfer(l_infor: torch.Tensor, l_stc: torch.Tensor) -> torch.Tensor:
    return l_infor + l_stc


def loss_total(l_transfer: torch.Tensor, l_l1cd: torch.Tensor, alpha: float = DEFAULT_ALPHA) -> torch.Tensor:
    """``alpha * l_transfer + l_l1cd``.

    :raises ValueError: ``alpha`` is not positive.
    """
    if not alpha > 0:
        raise ValueError(f"loss_total invalid alpha ({alpha}). Must be > 0")
    return alpha * l_transfer + l_l1cd


def chamfer_l1_loss(pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Differentiable Chamfer-L1 of (B, N, 3) predictions against (B, M, 3) targets, averaged over the batch.

    Matches :func:`egiinet.utils.geometry.chamfer_l1` per sample.
    """
    if pred.dim() == 2:
        pred, target = pred.unsqueeze(0), target.unsqueeze(0)
    sq = ((pred.unsqueeze(2) - target.unsqueeze(1)) ** 2).sum(-1)
    # clamp keeps sqrt differentiable at coincident points
    d_pred = sq.min(dim=2).values.clamp_min(1e-24).sqrt()
    d_target = sq.min(dim=1).values.clamp_min(1e-24).sqrt()
    return (0.5 * d_pred.mean(dim=1) + 0.5 * d_target.mean(dim=1)).mean()


@dataclass
class LossBundle:
    """Every scalar loss of one forward pass.

    ``l_transfer`` is always populated, including for variants that keep it out of ``l_total``.
    """

    l_infor: torch.Tensor
    l_stc: torch.Tensor
    l_transfer: torch.Tensor
    l_l1cd: torch.Tensor
    l_total: torch.Tensor
    alpha: float = DEFAULT_ALPHA

    def as_floats(self) -> dict:
        return {
            "l_infor": float(self.l_infor.detach()),
            "l_stc": float(self.l_stc.detach()),
            "l_transfer": float(self.l_transfer.detach()),
            "l_l1cd": float(self.l_l1cd.detach()),
            "l_total": float(self.l_total.detach()),
        }
