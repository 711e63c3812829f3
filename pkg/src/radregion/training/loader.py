"""In-memory image store and deterministic augmented batch assembly.

The desk corpus fits comfortably in memory, so images are loaded once and
kept as float arrays.  Every augmentation draw gets its own generator
seeded from (run seed, record id, epoch, view), which makes data order
and augmentation bitwise reproducible for a fixed seed regardless of
batching.
"""

from __future__ import annotations

import zlib

import numpy as np
import torch

from radregion.data.index import DatasetIndex, RadiographRecord
from radregion.imaging.augment import augment
from radregion.imaging.cleaning import clean
from radregion.imaging.gauges import GaugeTemplate
from radregion.imaging.io import load_image
from radregion.imaging.profiles import AugmentationProfile


def _id_key(record_id: str) -> int:
    return zlib.crc32(record_id.encode())


def record_rng(seed: int, record_id: str, epoch: int, view: int = 0) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([seed, _id_key(record_id), epoch, view])
    )


class ImageStore:
    """id -> cleaned grayscale image, loaded once."""

    def __init__(self, index: DatasetIndex, apply_clean: bool = True):
        self.images: dict[str, np.ndarray] = {}
        for rec in index:
            img = load_image(rec.image_ref)
            self.images[rec.id] = clean(img) if apply_clean else img

    def __getitem__(self, record_id: str) -> np.ndarray:
        return self.images[record_id]

    def __len__(self) -> int:
        return len(self.images)


def epoch_order(records: tuple[RadiographRecord, ...], seed: int, epoch: int) -> list[int]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 487, epoch]))
    return rng.permutation(len(records)).tolist()


def view_pair_batch(
    store: ImageStore,
    records: list[RadiographRecord],
    seed: int,
    epoch: int,
    profile: AugmentationProfile,
    out_size: int,
    templates: list[GaugeTemplate] | None = None,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Stacked augmented views (B, H, W) x2 for one batch of records."""
    views_a, views_b = [], []
    for rec in records:
        img = store[rec.id]
        rng_a = record_rng(seed, rec.id, epoch, view=0)
        rng_b = record_rng(seed, rec.id, epoch, view=1)
        views_a.append(augment(img, rng_a, profile, out_size, templates))
        views_b.append(augment(img, rng_b, profile, out_size, templates))
    a = torch.from_numpy(np.stack(views_a).astype(np.float32))
    b = torch.from_numpy(np.stack(views_b).astype(np.float32))
    return a, b


def augmented_batch(
    store: ImageStore,
    records: list[RadiographRecord],
    seed: int,
    epoch: int,
    profile: AugmentationProfile,
    out_size: int,
    templates: list[GaugeTemplate] | None = None,
) -> torch.Tensor:
    views = []
    for rec in records:
        rng = record_rng(seed, rec.id, epoch, view=0)
        views.append(augment(store[rec.id], rng, profile, out_size, templates))
    return torch.from_numpy(np.stack(views).astype(np.float32))


def plain_batch(
    store: ImageStore,
    records: list[RadiographRecord],
    out_size: int,
) -> torch.Tensor:
    from radregion.imaging.augment import resize_to

    views = [resize_to(store[rec.id], out_size) for rec in records]
    return torch.from_numpy(np.stack(views).astype(np.float32))


def labels_tensor(records: list[RadiographRecord]) -> torch.Tensor:
    return torch.tensor([int(r.archive_label) for r in records], dtype=torch.long)
