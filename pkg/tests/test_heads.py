import numpy as np
import pytest
import torch

from radregion.errors import ShapeMismatch
from radregion.ssl.heads import PredictionHead, ProjectionHead, predict_byol, project


class TestProjectionHead:
    def test_structure(self):
        head = ProjectionHead()
        layers = list(head.net.children())
        assert isinstance(layers[0], torch.nn.Linear)
        assert isinstance(layers[1], torch.nn.BatchNorm1d)
        assert isinstance(layers[2], torch.nn.ReLU)
        assert isinstance(layers[3], torch.nn.Linear)
        assert layers[0].in_features == 512
        assert layers[3].out_features == 128

    def test_zero_weights_give_zero_output(self):
        head = ProjectionHead(8, 8, 4)
        with torch.no_grad():
            for p in head.parameters():
                p.zero_()
        head.eval()
        out = head(torch.randn(3, 8))
        assert torch.equal(out, torch.zeros(3, 4))

    def test_identity_like_head_preserves_direction(self):
        # first layer identity, no bias; BN in eval with unit stats;
        # second layer identity -> output == input for standardized batches
        head = ProjectionHead(6, 6, 6)
        with torch.no_grad():
            head.net[0].weight.copy_(torch.eye(6))
            head.net[0].bias.zero_()
            head.net[3].weight.copy_(torch.eye(6))
            head.net[3].bias.zero_()
            head.net[1].running_mean.zero_()
            head.net[1].running_var.fill_(1.0)
            head.net[1].weight.fill_(1.0)
            head.net[1].bias.zero_()
        head.eval()
        x = torch.abs(torch.randn(4, 6)) + 0.1  # positive: ReLU transparent
        with torch.no_grad():
            out = head(x)
        cos = torch.nn.functional.cosine_similarity(out, x, dim=1)
        assert float(cos.min()) > 1 - 1e-5

    def test_identical_inputs_identical_outputs_eval(self):
        head = ProjectionHead(16, 16, 8)
        head.eval()
        x = torch.randn(1, 16).repeat(2, 1)
        out = head(x)
        assert torch.equal(out[0], out[1])

    def test_width_mismatch(self):
        head = ProjectionHead(16, 16, 8)
        with pytest.raises(ShapeMismatch):
            project(torch.randn(2, 12), head)


class TestPredictionHead:
    def test_default_dims(self):
        pred = PredictionHead()
        layers = list(pred.net.children())
        assert layers[0].in_features == 128
        assert layers[0].out_features == 512
        assert layers[3].out_features == 128

    def test_predict_byol_delegates(self):
        pred = PredictionHead(8, 8, 8)
        pred.eval()
        z = torch.randn(3, 8)
        assert torch.equal(predict_byol(z, pred), pred(z))
