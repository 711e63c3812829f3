"""Grayscale image I/O.

Images are float32 H x W arrays with intensities in [0, 1] everywhere in
the package; on disk they are 8-bit grayscale PNGs.  Channel replication
for the encoder happens at model input, never here.
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from radregion.errors import MissingFile


def load_image(path: str | Path) -> np.ndarray:
    img = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
    if img is None:
        raise MissingFile(f"cannot read image: {path}")
    return img.astype(np.float32) / 255.0


def save_image(image: np.ndarray, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8)
    if not cv2.imwrite(str(path), data):
        raise OSError(f"cannot write image: {path}")


def to_uint8(image: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8)
