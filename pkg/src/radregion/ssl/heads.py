"""Projection and prediction heads: linear -> batch norm -> ReLU -> linear."""

from __future__ import annotations

import torch
from torch import nn

EMBED_WIDTH = 512
HEAD_HIDDEN = 512
HEAD_OUT = 128


class ProjectionHead(nn.Module):
    """2-layer MLP mapping encoder embeddings to the contrastive space."""

    def __init__(self, in_dim: int = EMBED_WIDTH, hidden_dim: int = HEAD_HIDDEN,
                 out_dim: int = HEAD_OUT):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(in_dim, hidden_dim),
            nn.BatchNorm1d(hidden_dim),
            nn.ReLU(inplace=True),
            nn.Linear(hidden_dim, out_dim),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)


class PredictionHead(ProjectionHead):
    """Same architecture, applied on the online branch after projection."""

    def __init__(self, in_dim: int = HEAD_OUT, hidden_dim: int = HEAD_HIDDEN,
                 out_dim: int = HEAD_OUT):
        super().__init__(in_dim, hidden_dim, out_dim)


def project(embedding: torch.Tensor, head: ProjectionHead) -> torch.Tensor:
    if embedding.shape[-1] != head.net[0].in_features:
        from radregion.errors import ShapeMismatch

        raise ShapeMismatch(
            f"embedding width {embedding.shape[-1]} != head input "
            f"{head.net[0].in_features}"
        )
    return head(embedding)


def predict_byol(projection: torch.Tensor, predictor: PredictionHead) -> torch.Tensor:
    return project(projection, predictor)
