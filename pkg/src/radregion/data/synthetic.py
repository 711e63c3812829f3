"""Procedural desk-scale corpus: 14 distinct silhouette families.

The generator stands in for an unavailable hospital archive.  Each region
code gets its own hand-designed silhouette (strokes, ellipses, stacked
blocks) so that the classes are separable by a small CNN; realism is not a
goal.  Images are deterministic in (seed, class, instance), carry optional
near-white border frames to exercise the cleaning step, and every object's
ground-truth bounding box is written to ``boxes.json``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from radregion.data.index import DatasetIndex, RadiographRecord
from radregion.data.manifest import save_manifest
from radregion.errors import UnwritableOutputDir
from radregion.regions import AnatomicalRegion

# supersampling factor for smooth strokes at small output sizes
_SS = 4
# shape pixels stay strictly below the border-detector threshold
_MAX_SHAPE_INTENSITY = 0.93


@dataclass(frozen=True)
class SyntheticConfig:
    images_per_class: int = 200
    image_size: int = 64
    seed: int = 0
    background_noise_level: float = 0.08
    border_probability: float = 0.3
    rotation_jitter_degrees: tuple[float, float] = (-12.0, 12.0)

    def __post_init__(self):
        if self.image_size < 32:
            raise ValueError("image_size must be >= 32")
        if self.images_per_class < 10:
            raise ValueError("images_per_class must be >= 10")
        if not 0.0 <= self.background_noise_level <= 1.0:
            raise ValueError("background_noise_level must be in [0, 1]")
        if not 0.0 <= self.border_probability <= 1.0:
            raise ValueError("border_probability must be in [0, 1]")


class _Pen:
    """Drawing helpers on a supersampled canvas, in unit coordinates.

    Every instance draws with its own global scale, aspect, offset, stroke
    width, and intensity, so class members vary visibly while the family's
    topology stays fixed.
    """

    def __init__(self, canvas: np.ndarray, rng: np.random.Generator):
        self.c = canvas
        self.S = canvas.shape[0]
        self.rng = rng
        self.base = float(rng.uniform(0.55, 0.85))
        s = float(rng.uniform(0.8, 1.15))
        self._sx = s * float(rng.uniform(0.9, 1.1))
        self._sy = s * float(rng.uniform(0.9, 1.1))
        dx, dy = rng.uniform(-0.05, 0.05, size=2)
        self._dx, self._dy = float(dx), float(dy)
        self.t = max(2, int(round(self.S / 30 * rng.uniform(0.75, 1.35))))

    def ink(self) -> float:
        return float(min(self.base * self.rng.uniform(0.85, 1.15), _MAX_SHAPE_INTENSITY))

    def jitter(self, lo: float, hi: float) -> float:
        return float(self.rng.uniform(lo, hi))

    def count(self, lo: int, hi: int) -> int:
        return int(self.rng.integers(lo, hi + 1))

    def pt(self, x: float, y: float) -> tuple[int, int]:
        x = (x - 0.5) * self._sx + 0.5 + self._dx
        y = (y - 0.5) * self._sy + 0.5 + self._dy
        return int(round(x * self.S)), int(round(y * self.S))

    def px(self, r: float) -> int:
        return max(1, int(round(r * (self._sx + self._sy) / 2 * self.S)))

    def line(self, p1, p2, width=1.0):
        cv2.line(self.c, self.pt(*p1), self.pt(*p2), self.ink(),
                 max(1, int(round(self.t * width))), cv2.LINE_AA)

    def circle(self, center, r: float, fill=True, width=1.0):
        th = -1 if fill else max(1, int(round(self.t * width)))
        cv2.circle(self.c, self.pt(*center), self.px(r), self.ink(), th, cv2.LINE_AA)

    def ellipse(self, center, axes, angle=0.0, arc=(0, 360), fill=False, width=1.0):
        th = -1 if fill else max(1, int(round(self.t * width)))
        cv2.ellipse(self.c, self.pt(*center), (self.px(axes[0]), self.px(axes[1])),
                    angle, arc[0], arc[1], self.ink(), th, cv2.LINE_AA)

    def rect(self, p1, p2):
        cv2.rectangle(self.c, self.pt(*p1), self.pt(*p2), self.ink(), -1)

    def poly(self, points):
        pts = np.array([self.pt(*p) for p in points], dtype=np.int32)
        cv2.fillPoly(self.c, [pts], self.ink(), cv2.LINE_AA)


def _draw_clavicle(p: _Pen):
    xs = np.linspace(0.2, 0.8, 7)
    phase = p.jitter(-0.6, 0.6)
    amp = p.jitter(0.04, 0.08)
    ys = 0.5 + amp * np.sin(np.linspace(0, 2.2 * math.pi, 7) + phase)
    for a, b in zip(range(6), range(1, 7)):
        p.line((xs[a], ys[a]), (xs[b], ys[b]), width=1.5)
    p.circle((xs[0], ys[0]), p.jitter(0.022, 0.034))
    p.circle((xs[-1], ys[-1]), p.jitter(0.022, 0.034))


def _draw_shoulder(p: _Pen):
    head = p.jitter(0.09, 0.13)
    p.circle((0.56, 0.42), head)
    p.ellipse((0.45, 0.38), (0.17, 0.12), angle=p.jitter(5, 35),
              arc=(140, 320), width=1.6)
    p.line((0.56, 0.5), (0.51 + p.jitter(-0.04, 0.04), 0.8), width=2.2)


def _draw_skull(p: _Pen):
    p.ellipse((0.5, 0.42), (p.jitter(0.17, 0.22), p.jitter(0.14, 0.18)),
              fill=False, width=1.8)
    p.ellipse((0.47, 0.62), (p.jitter(0.08, 0.12), 0.055), fill=True)
    p.circle((0.44, 0.42), p.jitter(0.025, 0.04))


def _draw_rib(p: _Pen):
    arcs = p.count(3, 5)
    step = p.jitter(0.1, 0.15)
    for i in range(arcs):
        p.ellipse((0.5, 0.28 + step * i), (0.24 - 0.02 * i, p.jitter(0.08, 0.12)),
                  arc=(195, 345), width=1.2)


def _draw_elbow(p: _Pen):
    bend_x = p.jitter(0.45, 0.55)
    p.line((0.34, 0.24), (bend_x, 0.5), width=2.0)
    p.line((bend_x, 0.5), (0.74, p.jitter(0.58, 0.72)), width=1.8)
    p.circle((bend_x, 0.5), p.jitter(0.04, 0.06))


def _draw_knee(p: _Pen):
    w = p.jitter(0.05, 0.075)
    gap = p.jitter(0.03, 0.06)
    p.rect((0.5 - w, 0.18), (0.5 + w, 0.48 - gap))
    p.rect((0.5 - w, 0.48 + gap), (0.5 + w, 0.8))
    p.circle((0.5 - w - p.jitter(0.05, 0.08), 0.46), p.jitter(0.034, 0.05))


def _draw_wrist(p: _Pen):
    p.rect((0.43, 0.5), (0.48, 0.8))
    p.rect((0.54, 0.5), (0.59, 0.8))
    spots = [(0.43, 0.42), (0.5, 0.4), (0.58, 0.42), (0.46, 0.33), (0.55, 0.33),
             (0.5, 0.46)]
    for cx, cy in spots[: p.count(4, 6)]:
        p.circle((cx + p.jitter(-0.015, 0.015), cy + p.jitter(-0.015, 0.015)),
                 p.jitter(0.022, 0.034))


def _draw_hand(p: _Pen):
    p.ellipse((0.5, 0.62), (p.jitter(0.09, 0.13), p.jitter(0.07, 0.11)), fill=True)
    tips = [(0.3, 0.37), (0.4, 0.28), (0.5, 0.24), (0.6, 0.28), (0.71, 0.38)]
    for tip in tips[: p.count(4, 5)]:
        tip = (tip[0] + p.jitter(-0.02, 0.02), tip[1] + p.jitter(-0.02, 0.02))
        p.line((0.5, 0.57), tip, width=0.8)
        p.circle(tip, 0.016)


def _draw_foot(p: _Pen):
    arch = p.jitter(0.5, 0.56)
    p.poly([(0.24, 0.6), (arch, 0.52), (0.78, 0.56), (0.79, 0.65),
            (0.55, 0.7), (0.24, 0.7)])
    p.circle((0.28, 0.64), p.jitter(0.04, 0.06))
    toes = [(0.81, 0.55), (0.84, 0.59), (0.85, 0.63), (0.82, 0.51)]
    for cx, cy in toes[: p.count(2, 4)]:
        p.circle((cx, cy), 0.018)


def _draw_ankle(p: _Pen):
    w = p.jitter(0.035, 0.055)
    p.rect((0.515 - w, 0.18), (0.515 + w, 0.54))
    p.rect((0.34, 0.64), (0.76, 0.64 + p.jitter(0.06, 0.1)))
    p.circle((0.52, 0.58), p.jitter(0.045, 0.06), fill=False, width=1.2)


def _draw_pelvis_hip(p: _Pen):
    wing = (p.jitter(0.08, 0.12), p.jitter(0.12, 0.16))
    tilt = p.jitter(8, 18)
    p.ellipse((0.37, 0.42), wing, angle=-tilt, width=1.4)
    p.ellipse((0.63, 0.42), wing, angle=tilt, width=1.4)
    p.rect((0.47, 0.34), (0.53, 0.52))
    r = p.jitter(0.038, 0.054)
    p.circle((0.38, 0.62), r)
    p.circle((0.62, 0.62), r)


def _draw_cervical_spine(p: _Pen):
    n = p.count(4, 6)
    bend = p.jitter(0.02, 0.045)
    step = 0.52 / n
    for i in range(n):
        cx = 0.5 + bend * math.sin(i * 0.9)
        cy = 0.26 + step * i
        p.rect((cx - 0.05, cy - 0.032), (cx + 0.05, cy + 0.032))


def _draw_thoracic_spine(p: _Pen):
    n = p.count(7, 9)
    step = 0.6 / n
    for i in range(n):
        cx = 0.5 + 0.012 * math.sin(i * 0.7)
        cy = 0.18 + step * i
        p.rect((cx - 0.04, cy - 0.024), (cx + 0.04, cy + 0.024))
        stub = p.jitter(0.1, 0.16)
        if i % 2 == 0:
            p.line((cx + 0.045, cy), (cx + stub, cy + 0.025), width=0.7)
        else:
            p.line((cx - 0.045, cy), (cx - stub, cy + 0.025), width=0.7)


def _draw_lumbar_spine(p: _Pen):
    n = p.count(4, 6)
    step = 0.56 / n
    w = p.jitter(0.07, 0.09)
    for i in range(n):
        cy = 0.22 + step * i
        p.rect((0.5 - w, cy - 0.042), (0.5 + w, cy + 0.042))


_SHAPE_FAMILIES = {
    AnatomicalRegion.clavicle: _draw_clavicle,
    AnatomicalRegion.shoulder: _draw_shoulder,
    AnatomicalRegion.skull: _draw_skull,
    AnatomicalRegion.rib: _draw_rib,
    AnatomicalRegion.elbow: _draw_elbow,
    AnatomicalRegion.knee: _draw_knee,
    AnatomicalRegion.wrist: _draw_wrist,
    AnatomicalRegion.hand: _draw_hand,
    AnatomicalRegion.foot: _draw_foot,
    AnatomicalRegion.ankle: _draw_ankle,
    AnatomicalRegion.pelvis_hip: _draw_pelvis_hip,
    AnatomicalRegion.cervical_spine: _draw_cervical_spine,
    AnatomicalRegion.thoracic_spine: _draw_thoracic_spine,
    AnatomicalRegion.lumbar_spine: _draw_lumbar_spine,
}


def render_shape(
    region: AnatomicalRegion,
    size: int,
    rng: np.random.Generator,
    rotation_deg: float = 0.0,
) -> np.ndarray:
    """Render one silhouette instance (shape layer only, no noise/border)."""
    canvas = np.zeros((size * _SS, size * _SS), dtype=np.float32)
    pen = _Pen(canvas, rng)
    _SHAPE_FAMILIES[region](pen)
    if abs(rotation_deg) > 1e-9:
        c = size * _SS / 2.0
        m = cv2.getRotationMatrix2D((c, c), rotation_deg, 1.0)
        canvas = cv2.warpAffine(canvas, m, canvas.shape[::-1],
                                flags=cv2.INTER_LINEAR, borderValue=0.0)
    shape = cv2.resize(canvas, (size, size), interpolation=cv2.INTER_AREA)
    return np.clip(shape, 0.0, _MAX_SHAPE_INTENSITY)


def object_bbox(image: np.ndarray, threshold: float = 0.35) -> tuple[int, int, int, int]:
    """Bounding box (x0, y0, x1, y1), end-exclusive, of the bright object.

    Valid as ground truth for synthetic images because the generator keeps
    background noise well below `threshold` and the object well above it.
    """
    mask = image >= threshold
    if not mask.any():
        return (0, 0, image.shape[1], image.shape[0])
    ys, xs = np.nonzero(mask)
    return (int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)


def _apply_shading(image: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Low-frequency multiplicative exposure ramp, factor within [0.9, 1.1].

    Keeps object pixels well above the bbox threshold and background well
    below it, but varies the overall look the way uneven exposure does.
    """
    size = image.shape[0]
    strength = float(rng.uniform(0.0, 0.1))
    phi = float(rng.uniform(0.0, 2.0 * np.pi))
    yy, xx = np.mgrid[:size, :size] / max(size - 1, 1)
    ramp = (xx - 0.5) * np.cos(phi) + (yy - 0.5) * np.sin(phi)
    factor = 1.0 + 2.0 * strength * ramp.astype(np.float32)
    return np.clip(image * factor, 0.0, 1.0)


def _add_border(image: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    width = int(rng.integers(2, max(3, image.shape[0] // 12)))
    intensity = float(rng.uniform(0.97, 1.0))
    out = image.copy()
    out[:width, :] = intensity
    out[-width:, :] = intensity
    out[:, :width] = intensity
    out[:, -width:] = intensity
    return out


def generate_synthetic(config: SyntheticConfig, out_dir: str | Path) -> DatasetIndex:
    """Emit images_per_class x 14 grayscale PNGs plus manifest and boxes.

    Deterministic for a fixed config.seed: two runs produce byte-identical
    image files.
    """
    out_dir = Path(out_dir)
    try:
        (out_dir / "images").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UnwritableOutputDir(str(out_dir)) from exc
    if not os.access(out_dir, os.W_OK):
        raise UnwritableOutputDir(str(out_dir))

    lo, hi = config.rotation_jitter_degrees
    records: list[RadiographRecord] = []
    boxes: dict[str, list[int]] = {}
    for region in AnatomicalRegion:
        class_dir = out_dir / "images" / region.name
        class_dir.mkdir(parents=True, exist_ok=True)
        for idx in range(config.images_per_class):
            rng = np.random.default_rng(
                np.random.SeedSequence([config.seed, int(region), idx])
            )
            rotation = float(rng.uniform(lo, hi))
            shape = render_shape(region, config.image_size, rng, rotation)
            noise = rng.uniform(
                0.0, config.background_noise_level, size=shape.shape
            ).astype(np.float32)
            img = np.maximum(shape, noise)
            img = _apply_shading(img, rng)
            if rng.uniform() < config.border_probability:
                img = _add_border(img, rng)

            rec_id = f"{region.name}-{idx:04d}"
            rel_path = Path("images") / region.name / f"{idx:04d}.png"
            abs_path = out_dir / rel_path
            data = np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)
            if not cv2.imwrite(str(abs_path), data):
                raise UnwritableOutputDir(str(abs_path))
            boxes[rec_id] = list(object_bbox(shape))
            records.append(
                RadiographRecord(id=rec_id, image_ref=str(abs_path),
                                 archive_label=region)
            )

    index = DatasetIndex(records=tuple(records))
    save_manifest(index, out_dir / "manifest.csv")
    with (out_dir / "boxes.json").open("w") as fh:
        json.dump(boxes, fh, indent=0)
    return index
