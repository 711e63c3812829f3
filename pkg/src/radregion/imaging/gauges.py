"""Circular calibration-gauge insertion.

Surgery-planning gauges show up as bright circular objects on real
radiographs and act as a spurious class cue.  Training inserts synthetic
look-alikes at random so the encoder learns to ignore them.  Templates
are drawn procedurally (ring, radial ticks, center dot) in three sizes
and two stroke widths; each carries an alpha mask that is nonzero only
inside the disk.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from radregion.errors import ImageTooSmallWarning
from radregion.imaging.io import load_image, save_image
from radregion.imaging.profiles import AugmentationProfile


@dataclass(frozen=True)
class GaugeTemplate:
    patch: np.ndarray   # H x W intensities in [0, 1]
    alpha: np.ndarray   # H x W in [0, 1], nonzero only inside the disk
    diameter: int       # nominal diameter in pixels


def _draw_template(diameter: int, stroke: int) -> GaugeTemplate:
    ss = 4
    size = diameter * ss
    c = size // 2
    radius = c - ss
    patch = np.full((size, size), 0.38, dtype=np.float32)  # metallic interior
    cv2.circle(patch, (c, c), radius, 0.95, stroke * ss, cv2.LINE_AA)
    for k in range(12):
        ang = k * np.pi / 6.0
        r0, r1 = int(radius * 0.72), int(radius * 0.95)
        p0 = (int(round(c + r0 * np.cos(ang))), int(round(c + r0 * np.sin(ang))))
        p1 = (int(round(c + r1 * np.cos(ang))), int(round(c + r1 * np.sin(ang))))
        cv2.line(patch, p0, p1, 0.9, max(1, stroke * ss // 2), cv2.LINE_AA)
    cv2.circle(patch, (c, c), max(1, radius // 6), 0.92, -1, cv2.LINE_AA)

    alpha = np.zeros((size, size), dtype=np.float32)
    cv2.circle(alpha, (c, c), radius + ss // 2, 1.0, -1, cv2.LINE_AA)

    patch = cv2.resize(patch, (diameter, diameter), interpolation=cv2.INTER_AREA)
    alpha = cv2.resize(alpha, (diameter, diameter), interpolation=cv2.INTER_AREA)
    # keep the mask strictly inside the circle after resampling
    yy, xx = np.mgrid[:diameter, :diameter]
    rr = (xx - diameter / 2 + 0.5) ** 2 + (yy - diameter / 2 + 0.5) ** 2
    alpha[rr > (diameter / 2) ** 2] = 0.0
    return GaugeTemplate(patch=np.clip(patch, 0, 1), alpha=np.clip(alpha, 0, 1),
                         diameter=diameter)


_DEFAULT: list[GaugeTemplate] | None = None


def default_templates() -> list[GaugeTemplate]:
    """Six templates: diameters {24, 36, 48} x stroke widths {2, 4}."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = [_draw_template(d, s) for d in (24, 36, 48) for s in (2, 4)]
    return _DEFAULT


def write_assets(directory: str | Path) -> list[Path]:
    """Dump templates as <name>.png / <name>_mask.png pairs."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for i, t in enumerate(default_templates()):
        base = directory / f"gauge_{i:02d}_d{t.diameter}"
        save_image(t.patch, base.with_suffix(".png"))
        save_image(t.alpha, Path(str(base) + "_mask.png"))
        written.append(base.with_suffix(".png"))
    return written


def load_assets(directory: str | Path) -> list[GaugeTemplate]:
    directory = Path(directory)
    templates = []
    for patch_path in sorted(directory.glob("*.png")):
        if patch_path.stem.endswith("_mask"):
            continue
        mask_path = directory / (patch_path.stem + "_mask.png")
        patch = load_image(patch_path)
        alpha = load_image(mask_path)
        templates.append(GaugeTemplate(patch=patch, alpha=alpha,
                                       diameter=patch.shape[0]))
    return templates


@dataclass(frozen=True)
class GaugePlacement:
    template_index: int
    scale: float
    opacity: float
    x: int  # top-left, fully inside the image
    y: int


def sample_gauge_plan(
    rng: np.random.Generator,
    profile: AugmentationProfile,
    image_shape: tuple[int, int],
    templates: list[GaugeTemplate] | None = None,
) -> list[GaugePlacement]:
    """Draw the insertion count and per-gauge parameters.

    Placements that cannot fit fully inside the image are dropped (the
    draw still consumes its random numbers so sequences stay aligned).
    """
    templates = templates if templates is not None else default_templates()
    h, w = image_shape
    count = int(rng.choice(3, p=np.asarray(profile.gauge_count_probs)))
    plan: list[GaugePlacement] = []
    for _ in range(count):
        idx = int(rng.integers(len(templates)))
        scale = float(rng.uniform(*profile.gauge_scale))
        opacity = float(rng.uniform(*profile.gauge_opacity))
        size = max(2, int(round(templates[idx].diameter * scale)))
        if size > min(h, w):
            rng.uniform(size=2)  # burn the position draws
            warnings.warn("image too small for gauge insertion; skipped",
                          ImageTooSmallWarning)
            continue
        x = int(np.floor(rng.uniform(0, w - size + 1)))
        y = int(np.floor(rng.uniform(0, h - size + 1)))
        plan.append(GaugePlacement(idx, scale, opacity, x, y))
    return plan


def apply_gauge_plan(
    image: np.ndarray,
    plan: list[GaugePlacement],
    templates: list[GaugeTemplate] | None = None,
) -> np.ndarray:
    templates = templates if templates is not None else default_templates()
    if not plan:
        return image
    out = image.copy()
    for g in plan:
        t = templates[g.template_index]
        size = max(2, int(round(t.diameter * g.scale)))
        if size == t.diameter:
            patch, alpha = t.patch, t.alpha
        else:
            patch = cv2.resize(t.patch, (size, size), interpolation=cv2.INTER_LINEAR)
            alpha = cv2.resize(t.alpha, (size, size), interpolation=cv2.INTER_LINEAR)
        region = out[g.y : g.y + size, g.x : g.x + size]
        blend = alpha * g.opacity
        region[:] = region * (1.0 - blend) + patch * blend
    return np.clip(out, 0.0, 1.0)


def insert_gauges(
    image: np.ndarray,
    rng: np.random.Generator,
    profile: AugmentationProfile,
    templates: list[GaugeTemplate] | None = None,
    return_plan: bool = False,
):
    """Insert 0-2 gauges per the profile's count probabilities."""
    plan = sample_gauge_plan(rng, profile, image.shape, templates)
    out = apply_gauge_plan(image, plan, templates)
    if return_plan:
        return out, plan
    return out
