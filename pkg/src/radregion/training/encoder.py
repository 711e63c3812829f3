"""Encoder contract: 18-layer residual network, classification layer removed.

``Encoder.forward`` accepts single-channel images and replicates them to
three channels to match the standard residual stem; output embeddings are
512-wide (post global average pooling).  Checkpoints are a torch archive
of the parameter tensors plus a JSON metadata sidecar.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch import nn
from torchvision.models import resnet18

from radregion.errors import ShapeMismatch

EMBED_WIDTH = 512


class Encoder(nn.Module):
    def __init__(self):
        super().__init__()
        net = resnet18(weights=None)
        net.fc = nn.Identity()
        self.net = net

    @property
    def cam_layer(self) -> nn.Module:
        # last convolutional block; attribution hooks attach here
        return self.net.layer4

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim == 3:
            x = x.unsqueeze(1)
        if x.ndim != 4:
            raise ShapeMismatch(f"expected (B, 1, H, W) or (B, H, W), got {tuple(x.shape)}")
        if x.shape[1] == 1:
            x = x.expand(-1, 3, -1, -1)
        elif x.shape[1] != 3:
            raise ShapeMismatch(f"expected 1 or 3 channels, got {x.shape[1]}")
        return self.net(x)


def build_encoder(seed: int = 0) -> Encoder:
    torch.manual_seed(seed)
    return Encoder()


@dataclass
class EncoderCheckpoint:
    model: Encoder
    method: str                     # simclr | byol | supcon | supervised
    config: dict = field(default_factory=dict)
    epochs: int = 0

    def config_hash(self) -> str:
        blob = json.dumps(self.config, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save({"state_dict": self.model.state_dict()}, path)
        sidecar = {
            "method": self.method,
            "config": self.config,
            "config_hash": self.config_hash(),
            "epochs": self.epochs,
            "embed_width": EMBED_WIDTH,
        }
        Path(str(path) + ".json").write_text(json.dumps(sidecar, indent=2) + "\n")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "EncoderCheckpoint":
        path = Path(path)
        payload = torch.load(path, map_location="cpu", weights_only=True)
        meta = json.loads(Path(str(path) + ".json").read_text())
        model = Encoder()
        model.load_state_dict(payload["state_dict"])
        model.eval()
        return cls(model=model, method=meta["method"], config=meta["config"],
                   epochs=meta["epochs"])


def _as_batch_tensor(images: np.ndarray | torch.Tensor) -> torch.Tensor:
    if isinstance(images, np.ndarray):
        images = torch.from_numpy(np.ascontiguousarray(images, dtype=np.float32))
    return images.float()


@torch.no_grad()
def encode(
    checkpoint: EncoderCheckpoint | Encoder,
    images: np.ndarray | torch.Tensor,
    batch_size: int = 256,
) -> torch.Tensor:
    """Deterministic eval-mode embeddings, shape (batch, 512)."""
    model = checkpoint.model if isinstance(checkpoint, EncoderCheckpoint) else checkpoint
    was_training = model.training
    model.eval()
    x = _as_batch_tensor(images)
    outs = [model(x[i : i + batch_size]) for i in range(0, x.shape[0], batch_size)]
    if was_training:
        model.train()
    return torch.cat(outs, dim=0)
