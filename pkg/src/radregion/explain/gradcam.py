"""Guided class-activation attribution.

The class-activation map comes from the last convolutional block
(channels weighted by spatially pooled gradients, rectified, upsampled to
input size) and is multiplied elementwise with guided-backpropagation
input gradients, where negative gradients are suppressed at every
rectifier during the backward pass.  The normalized map is for
visualization; the raw product is kept for quantitative use.
"""

from __future__ import annotations

import warnings
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from radregion.errors import InvalidClass
from radregion.regions import NUM_REGIONS
from radregion.training.encoder import EncoderCheckpoint
from radregion.training.linear import LinearHead


@dataclass
class AttributionMap:
    heatmap: np.ndarray          # H x W, min-max normalized to [0, 1]
    raw: np.ndarray              # H x W, unnormalized nonnegative product
    target_class: int
    record_id: str
    blend: np.ndarray            # H x W x 3 uint8 overlay for reports


class ClassifierModel(nn.Module):
    """Frozen encoder + linear head as a single differentiable classifier."""

    def __init__(self, checkpoint: EncoderCheckpoint, head: LinearHead):
        super().__init__()
        self.encoder = checkpoint.model
        self.head = head
        self.training_epochs = checkpoint.epochs

    @property
    def cam_layer(self) -> nn.Module:
        return self.encoder.cam_layer

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.encoder(x))


class _GuidedReLUFunction(torch.autograd.Function):
    @staticmethod
    def forward(ctx, x):
        ctx.save_for_backward(x)
        return x.clamp(min=0)

    @staticmethod
    def backward(ctx, grad_output):
        (x,) = ctx.saved_tensors
        return grad_output * (x > 0) * (grad_output > 0)


class _GuidedReLU(nn.Module):
    def forward(self, x):
        return _GuidedReLUFunction.apply(x)


@contextmanager
def _guided_relus(model: nn.Module):
    replaced: list[tuple[nn.Module, str, nn.Module]] = []
    for module in model.modules():
        for name, child in module.named_children():
            if isinstance(child, nn.ReLU):
                replaced.append((module, name, child))
                setattr(module, name, _GuidedReLU())
    try:
        yield
    finally:
        for parent, name, original in replaced:
            setattr(parent, name, original)


def _prepare_input(image: np.ndarray) -> torch.Tensor:
    x = torch.from_numpy(np.ascontiguousarray(image, dtype=np.float32))
    return x.unsqueeze(0).unsqueeze(0)  # (1, 1, H, W)


def _cam(model: nn.Module, x: torch.Tensor, target_class: int,
         cam_layer: nn.Module) -> torch.Tensor:
    stash: dict[str, torch.Tensor] = {}

    def fwd_hook(_module, _inputs, output):
        stash["act"] = output
        output.register_hook(lambda g: stash.__setitem__("grad", g))

    handle = cam_layer.register_forward_hook(fwd_hook)
    try:
        # gradients flow through the input so frozen backbones still work
        with torch.enable_grad():
            model.zero_grad(set_to_none=True)
            logits = model(x.clone().requires_grad_(True))
            logits[0, target_class].backward()
    finally:
        handle.remove()
    act, grad = stash["act"], stash["grad"]
    weights = grad.mean(dim=(2, 3), keepdim=True)
    cam = torch.relu((weights * act).sum(dim=1, keepdim=True))
    cam = torch.nn.functional.interpolate(
        cam, size=x.shape[-2:], mode="bilinear", align_corners=False
    )
    return cam[0, 0].detach()


def _guided_input_gradient(model: nn.Module, x: torch.Tensor,
                           target_class: int) -> torch.Tensor:
    with _guided_relus(model), torch.enable_grad():
        leaf = x.clone().requires_grad_(True)
        model.zero_grad(set_to_none=True)
        logits = model(leaf)
        logits[0, target_class].backward()
        grad = leaf.grad[0].mean(dim=0)
    return torch.relu(grad).detach()


def _blend(image: np.ndarray, heatmap: np.ndarray) -> np.ndarray:
    import cv2

    base = np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8)
    colored = cv2.applyColorMap(
        np.clip(np.rint(heatmap * 255.0), 0, 255).astype(np.uint8),
        cv2.COLORMAP_JET,
    )
    gray3 = cv2.cvtColor(base, cv2.COLOR_GRAY2BGR)
    return cv2.addWeighted(gray3, 0.55, colored, 0.45, 0.0)


def guided_gradcam(
    model: nn.Module,
    image: np.ndarray,
    target_class: int,
    cam_layer: nn.Module | None = None,
    record_id: str = "",
) -> AttributionMap:
    if not 0 <= int(target_class) < NUM_REGIONS:
        raise InvalidClass(f"class {target_class} outside 0..{NUM_REGIONS - 1}")
    if getattr(model, "training_epochs", None) == 0:
        warnings.warn("attribution from an untrained model is meaningless",
                      UserWarning)
    if cam_layer is None:
        cam_layer = getattr(model, "cam_layer", None)
        if cam_layer is None:
            raise ValueError("model exposes no cam_layer; pass one explicitly")

    model.eval()
    x = _prepare_input(image)
    cam = _cam(model, x, int(target_class), cam_layer)
    guided = _guided_input_gradient(model, x, int(target_class))
    raw = (cam * guided).numpy().astype(np.float64)

    peak = raw.max()
    heatmap = raw / peak if peak > 0 else np.zeros_like(raw)
    return AttributionMap(
        heatmap=heatmap,
        raw=raw,
        target_class=int(target_class),
        record_id=record_id,
        blend=_blend(image, heatmap),
    )


def heatmap_mass_fraction(raw: np.ndarray, bbox: tuple[int, int, int, int]) -> float:
    """Fraction of total attribution mass inside (x0, y0, x1, y1)."""
    total = float(raw.sum())
    if total <= 0:
        return 0.0
    x0, y0, x1, y1 = bbox
    return float(raw[y0:y1, x0:x1].sum()) / total


def save_triptych(image: np.ndarray, attribution: AttributionMap, path) -> None:
    """Input | blended | heatmap, side by side, as one PNG."""
    import cv2

    h, w = image.shape
    gray3 = cv2.cvtColor(
        np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8),
        cv2.COLOR_GRAY2BGR,
    )
    heat3 = cv2.applyColorMap(
        np.clip(np.rint(attribution.heatmap * 255.0), 0, 255).astype(np.uint8),
        cv2.COLORMAP_JET,
    )
    sep = np.full((h, 2, 3), 255, dtype=np.uint8)
    panel = np.concatenate([gray3, sep, attribution.blend, sep, heat3], axis=1)
    cv2.imwrite(str(path), panel)
