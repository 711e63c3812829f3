"""Augmentation strength profiles.

Two canonical constants exist: PRETRAIN (strong, used by the contrastive
pretraining objectives) and TRAIN (mild, used while fitting the linear
head).  Profiles serialize to JSON keyed by the hyperparameter row names
used in the configuration table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

Range = tuple[float, float]

_FIELD_KEYS = {
    "gauge_count_probs": "Gauge Occurrences",
    "gauge_scale": "Gauge Scale",
    "gauge_opacity": "Gauge Opacity",
    "jitter_brightness": "Color Jitter Brightness",
    "jitter_contrast": "Color Jitter Contrast",
    "affine_rotation_deg": "Affine Rotation",
    "affine_translation_frac": "Affine Translation",
    "affine_scale": "Affine Scale",
    "affine_shear_deg": "Affine Shear",
    "crop_scale": "Random Resize Scale",
    "crop_ratio": "Random Resize Ratio",
}
_KEY_FIELDS = {v: k for k, v in _FIELD_KEYS.items()}


@dataclass(frozen=True)
class AugmentationProfile:
    gauge_count_probs: tuple[float, float, float]  # P(0), P(1), P(2) insertions
    gauge_scale: Range
    gauge_opacity: Range
    jitter_brightness: Range
    jitter_contrast: Range
    affine_rotation_deg: Range
    affine_translation_frac: Range
    affine_scale: Range
    affine_shear_deg: Range
    crop_scale: Range
    crop_ratio: Range

    def __post_init__(self):
        if abs(sum(self.gauge_count_probs) - 1.0) > 1e-9:
            raise ValueError("gauge_count_probs must sum to 1")
        if any(p < 0 for p in self.gauge_count_probs):
            raise ValueError("gauge_count_probs must be nonnegative")
        for name in _FIELD_KEYS:
            if name == "gauge_count_probs":
                continue
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: lower bound {lo} above upper bound {hi}")

    def to_dict(self) -> dict:
        return {key: list(getattr(self, field)) for field, key in _FIELD_KEYS.items()}

    def to_kwargs(self) -> dict:
        return {field: getattr(self, field) for field in _FIELD_KEYS}

    @classmethod
    def from_dict(cls, data: dict) -> "AugmentationProfile":
        kwargs = {}
        for key, value in data.items():
            field = _KEY_FIELDS.get(key)
            if field is None:
                raise ValueError(f"unknown profile key: {key!r}")
            kwargs[field] = tuple(float(v) for v in value)
        return cls(**kwargs)

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load_json(cls, path: str | Path) -> "AugmentationProfile":
        return cls.from_dict(json.loads(Path(path).read_text()))


PRETRAIN = AugmentationProfile(
    gauge_count_probs=(1 / 3, 1 / 3, 1 / 3),
    gauge_scale=(0.8, 1.2),
    gauge_opacity=(0.75, 1.0),
    jitter_brightness=(0.5, 1.5),
    jitter_contrast=(0.25, 1.75),
    affine_rotation_deg=(-15.0, 15.0),
    affine_translation_frac=(-0.1, 0.1),
    affine_scale=(0.8, 1.5),
    affine_shear_deg=(-30.0, 30.0),
    crop_scale=(0.08, 1.0),
    crop_ratio=(3 / 4, 4 / 3),
)

TRAIN = AugmentationProfile(
    gauge_count_probs=(1 / 3, 1 / 3, 1 / 3),
    gauge_scale=(0.8, 1.2),
    gauge_opacity=(0.75, 1.0),
    jitter_brightness=(0.9, 1.1),
    jitter_contrast=(0.8, 1.2),
    affine_rotation_deg=(-5.0, 5.0),
    affine_translation_frac=(-0.02, 0.02),
    affine_scale=(0.95, 1.1),
    affine_shear_deg=(-10.0, 10.0),
    crop_scale=(0.95, 1.1),
    crop_ratio=(0.9, 1.1),
)

# all stochastic parameters pinned to their do-nothing values; useful for
# pipeline identity checks
IDENTITY = AugmentationProfile(
    gauge_count_probs=(1.0, 0.0, 0.0),
    gauge_scale=(1.0, 1.0),
    gauge_opacity=(1.0, 1.0),
    jitter_brightness=(1.0, 1.0),
    jitter_contrast=(1.0, 1.0),
    affine_rotation_deg=(0.0, 0.0),
    affine_translation_frac=(0.0, 0.0),
    affine_scale=(1.0, 1.0),
    affine_shear_deg=(0.0, 0.0),
    crop_scale=(1.0, 1.0),
    crop_ratio=(1.0, 1.0),
)
