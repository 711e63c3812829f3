"""Stochastic augmentation pipeline.

Fixed stage order: gauge insertion -> brightness/contrast jitter ->
random affine (rotation, translation, scale, shear) -> random resized
crop to the model input size.  Gaussian blur is deliberately absent so
fine image detail survives.  Parameter sampling is split out of
application so that draw distributions can be tested directly; every
stage is a pure function of (image, params).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import cv2
import numpy as np

from radregion.imaging.gauges import (
    GaugePlacement,
    GaugeTemplate,
    apply_gauge_plan,
    sample_gauge_plan,
)
from radregion.imaging.profiles import AugmentationProfile


@dataclass(frozen=True)
class AugmentParams:
    gauges: tuple[GaugePlacement, ...]
    brightness: float
    contrast: float
    rotation_deg: float
    translate_x: float  # fraction of width
    translate_y: float  # fraction of height
    scale: float
    shear_x_deg: float
    shear_y_deg: float
    crop_area: float    # fraction of source area
    crop_aspect: float  # width / height
    crop_x: float       # top-left as fraction of the slack
    crop_y: float

    def is_identity_geometry(self) -> bool:
        return (
            self.rotation_deg == 0.0
            and self.translate_x == 0.0
            and self.translate_y == 0.0
            and self.scale == 1.0
            and self.shear_x_deg == 0.0
            and self.shear_y_deg == 0.0
        )


def sample_augment_params(
    rng: np.random.Generator,
    profile: AugmentationProfile,
    image_shape: tuple[int, int],
    templates: list[GaugeTemplate] | None = None,
) -> AugmentParams:
    gauges = tuple(sample_gauge_plan(rng, profile, image_shape, templates))
    return AugmentParams(
        gauges=gauges,
        brightness=float(rng.uniform(*profile.jitter_brightness)),
        contrast=float(rng.uniform(*profile.jitter_contrast)),
        rotation_deg=float(rng.uniform(*profile.affine_rotation_deg)),
        translate_x=float(rng.uniform(*profile.affine_translation_frac)),
        translate_y=float(rng.uniform(*profile.affine_translation_frac)),
        scale=float(rng.uniform(*profile.affine_scale)),
        shear_x_deg=float(rng.uniform(*profile.affine_shear_deg)),
        shear_y_deg=float(rng.uniform(*profile.affine_shear_deg)),
        crop_area=float(rng.uniform(*profile.crop_scale)),
        crop_aspect=float(rng.uniform(*profile.crop_ratio)),
        crop_x=float(rng.uniform()),
        crop_y=float(rng.uniform()),
    )


def _apply_jitter(image: np.ndarray, brightness: float, contrast: float) -> np.ndarray:
    if brightness == 1.0 and contrast == 1.0:
        return image
    out = image * brightness
    mean = float(out.mean())
    out = mean + contrast * (out - mean)
    return np.clip(out, 0.0, 1.0)


def _apply_affine(image: np.ndarray, p: AugmentParams) -> np.ndarray:
    if p.is_identity_geometry():
        return image
    h, w = image.shape
    cx, cy = w / 2.0 - 0.5, h / 2.0 - 0.5
    theta = math.radians(p.rotation_deg)
    rot = np.array(
        [[math.cos(theta), math.sin(theta)],
         [-math.sin(theta), math.cos(theta)]]
    )
    shear = np.array(
        [[1.0, math.tan(math.radians(p.shear_x_deg))],
         [math.tan(math.radians(p.shear_y_deg)), 1.0]]
    )
    lin = rot @ shear * p.scale
    center = np.array([cx, cy])
    offset = center - lin @ center + np.array([p.translate_x * w, p.translate_y * h])
    m = np.hstack([lin, offset[:, None]]).astype(np.float32)
    out = cv2.warpAffine(image, m, (w, h), flags=cv2.INTER_LINEAR,
                         borderMode=cv2.BORDER_CONSTANT, borderValue=0.0)
    return np.clip(out, 0.0, 1.0)


def _apply_crop_resize(image: np.ndarray, p: AugmentParams, out_size: int) -> np.ndarray:
    h, w = image.shape
    area = p.crop_area * h * w
    cw = int(round(math.sqrt(area * p.crop_aspect)))
    ch = int(round(math.sqrt(area / p.crop_aspect)))
    cw = min(max(cw, 1), w)
    ch = min(max(ch, 1), h)
    x0 = int(round(p.crop_x * (w - cw)))
    y0 = int(round(p.crop_y * (h - ch)))
    crop = image[y0 : y0 + ch, x0 : x0 + cw]
    if crop.shape == (out_size, out_size):
        return crop
    return np.clip(
        cv2.resize(crop, (out_size, out_size), interpolation=cv2.INTER_LINEAR),
        0.0, 1.0,
    )


def resize_to(image: np.ndarray, out_size: int) -> np.ndarray:
    """The resize the pipeline itself uses; identity when sizes match."""
    if image.shape == (out_size, out_size):
        return image
    return np.clip(
        cv2.resize(image, (out_size, out_size), interpolation=cv2.INTER_LINEAR),
        0.0, 1.0,
    )


def apply_augment(
    image: np.ndarray,
    params: AugmentParams,
    out_size: int,
    templates: list[GaugeTemplate] | None = None,
) -> np.ndarray:
    out = apply_gauge_plan(image, list(params.gauges), templates)
    out = _apply_jitter(out, params.brightness, params.contrast)
    out = _apply_affine(out, params)
    return _apply_crop_resize(out, params, out_size)


def augment(
    image: np.ndarray,
    rng: np.random.Generator,
    profile: AugmentationProfile,
    out_size: int,
    templates: list[GaugeTemplate] | None = None,
) -> np.ndarray:
    """One stochastic view of `image` at `out_size`, driven by `rng`."""
    params = sample_augment_params(rng, profile, image.shape, templates)
    return apply_augment(image, params, out_size, templates)


def make_view_pair(
    image: np.ndarray,
    rng: np.random.Generator,
    profile: AugmentationProfile,
    out_size: int,
    templates: list[GaugeTemplate] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Two independently augmented views of the same source image."""
    return (
        augment(image, rng, profile, out_size, templates),
        augment(image, rng, profile, out_size, templates),
    )
