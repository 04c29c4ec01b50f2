import pytest
import torch
from torch import nn

from egiinet.models.decoder import CompletionDecoder
from egiinet.models.fusion import CrossAttentionFusion
from egiinet.models.interaction import chamfer_l1_loss
from egiinet.models.transformer import MultiHeadAttention, TransformerBlock

from .test_model_utils import finite_difference_check


class TestCrossAttentionFusion:
    def test_attention_rows(self) -> None:
        fused, attn = CrossAttentionFusion(16, heads=2)(torch.randn(2, 8, 16), torch.randn(2, 6, 16))
        assert fused.shape == (2, 8, 16)
        assert attn.shape == (2, 2, 8, 6)
        assert torch.all(attn >= 0)
        assert torch.allclose(attn.sum(-1), torch.ones(2, 2, 8), atol=1e-5)

    def test_zeroed_branch_is_identity(self) -> None:
        fusion = CrossAttentionFusion(16, heads=2)
        for layer in (fusion.cross_attn.to_v, fusion.cross_attn.to_out):
            nn.init.zeros_(layer.weight)
            nn.init.zeros_(layer.bias)
        f_pc = torch.randn(2, 8, 16)
        fused, _ = fusion(f_pc, torch.randn(2, 8, 16))
        assert torch.equal(fused, f_pc)

    def test_single_image_token(self) -> None:
        _, attn = CrossAttentionFusion(16, heads=4)(torch.randn(1, 8, 16), torch.randn(1, 1, 16))
        assert torch.equal(attn, torch.ones(1, 4, 8, 1))

    def test_single_cross_attention(self) -> None:
        fusion = CrossAttentionFusion(16, heads=2)
        assert sum(isinstance(m, MultiHeadAttention) for m in fusion.modules()) == 1
        assert not any(isinstance(m, TransformerBlock) for m in fusion.modules())

    @pytest.mark.parametrize(
        ("pc_shape", "img_shape", "match"),
        [
            ((2, 8, 16), (2, 8, 12), r"invalid token shapes"),
            ((8, 16), (2, 8, 16), r"invalid token shapes"),
            ((2, 8, 16), (3, 8, 16), r"batch mismatch"),
        ],
    )
    def test_shape_errors(self, pc_shape: tuple, img_shape: tuple, match: str) -> None:
        with pytest.raises(ValueError, match=match):
            CrossAttentionFusion(16, heads=2)(torch.randn(*pc_shape), torch.randn(*img_shape))


class TestCompletionDecoder:
    @pytest.mark.parametrize("batch_size", [1, 3])
    def test_output_shape(self, batch_size: int) -> None:
        cloud = CompletionDecoder(16, num_tokens=8, num_points=64, depth=1, heads=2)(torch.randn(batch_size, 8, 16))
        assert cloud.shape == (batch_size, 64, 3)
        assert torch.all(torch.isfinite(cloud))

    def test_bad_num_points(self) -> None:
        with pytest.raises(ValueError, match=r"invalid num_points"):
            CompletionDecoder(16, num_tokens=8, num_points=60)

    def test_bad_token_count(self) -> None:
        decoder = CompletionDecoder(16, num_tokens=8, num_points=64, depth=1, heads=2)
        with pytest.raises(ValueError, match=r"invalid token shape"):
            decoder(torch.randn(1, 7, 16))

    def test_gradient_check(self) -> None:
        torch.manual_seed(0)
        decoder = CompletionDecoder(16, num_tokens=8, num_points=32, depth=1, heads=2).double()
        fused = torch.randn(1, 8, 16, dtype=torch.float64)
        target = torch.rand(1, 40, 3, dtype=torch.float64) - 0.5
        finite_difference_check(
            lambda: chamfer_l1_loss(decoder(fused), target), list(decoder.parameters()), checks=30, rtol=1e-3
        )

    def test_anchors_translate_token_points(self) -> None:
        torch.manual_seed(0)
        decoder = CompletionDecoder(16, num_tokens=8, num_points=32, depth=1, heads=2)
        fused = torch.randn(2, 8, 16)
        anchors = torch.randn(2, 8, 3)
        shift = (decoder(fused, anchors) - decoder(fused)).reshape(2, 8, 4, 3)
        assert torch.allclose(shift, anchors.unsqueeze(2).expand(-1, -1, 4, -1), atol=1e-6)

    def test_zero_head_places_points_on_anchors(self) -> None:
        decoder = CompletionDecoder(16, num_tokens=8, num_points=32, depth=1, heads=2)
        nn.init.zeros_(decoder.head[-1].weight)
        nn.init.zeros_(decoder.head[-1].bias)
        anchors = torch.randn(1, 8, 3)
        cloud = decoder(torch.randn(1, 8, 16), anchors)
        assert torch.equal(cloud, anchors.repeat_interleave(4, dim=1))

    def test_template_offsets_each_slot(self) -> None:
        decoder = CompletionDecoder(16, num_tokens=8, num_points=32, depth=1, heads=2)
        fused = torch.randn(1, 8, 16)
        before = decoder(fused)
        with torch.no_grad():
            decoder.template[2, 1] += torch.tensor([1.0, 0.0, 0.0])
        moved = (decoder(fused) - before).abs().sum(-1) > 1e-6
        assert moved.nonzero().flatten().tolist() == [2 * 4 + 1]

    @pytest.mark.parametrize("anchor_shape", [(1, 7, 3), (1, 8, 2), (2, 8, 3), (8, 3)])
    def test_bad_anchor_shape(self, anchor_shape: tuple) -> None:
        decoder = CompletionDecoder(16, num_tokens=8, num_points=32, depth=1, heads=2)
        with pytest.raises(ValueError, match=r"invalid anchor shape"):
            decoder(torch.randn(1, 8, 16), torch.randn(*anchor_shape))
