"""Deterministic image cleaning: border frame removal and rotation normalization.

Real archive exports frequently carry a near-white frame around the
capture area and arbitrary content rotation.  ``remove_border`` peels
full-perimeter near-white rings; ``normalize_rotation`` aligns the
min-area bounding rectangle of the foreground with the image axes.
``clean`` composes the two and is idempotent within quantization noise.
"""

from __future__ import annotations

import math
import warnings

import cv2
import numpy as np

from radregion.errors import DegenerateCropWarning, NoForegroundWarning

BORDER_INTENSITY = 0.95  # a ring counts as frame when all pixels reach this
MIN_CROP = 8             # never crop below 8x8
ALIGN_TOL_DEG = 3.5      # tilts below this count as aligned; rotations that
                         # fail to land below it are rejected as unstable


def rotate_image(image: np.ndarray, angle_deg: float) -> np.ndarray:
    """Rotate about the center, same canvas size, bilinear, fill 0."""
    h, w = image.shape
    m = cv2.getRotationMatrix2D((w / 2.0 - 0.5, h / 2.0 - 0.5), angle_deg, 1.0)
    return cv2.warpAffine(image, m, (w, h), flags=cv2.INTER_LINEAR,
                          borderMode=cv2.BORDER_CONSTANT, borderValue=0.0)


def _ring_is_white(image: np.ndarray, margin: int) -> bool:
    h, w = image.shape
    top = image[margin, margin : w - margin]
    bottom = image[h - 1 - margin, margin : w - margin]
    left = image[margin : h - margin, margin]
    right = image[margin : h - margin, w - 1 - margin]
    return all(
        side.size > 0 and float(side.min()) >= BORDER_INTENSITY
        for side in (top, bottom, left, right)
    )


def remove_border(image: np.ndarray) -> np.ndarray:
    """Crop off any full-perimeter frame of near-white pixels.

    Rings are peeled from the outside in; images without a complete white
    ring are returned unchanged.  If peeling would leave less than 8x8
    pixels the input is returned unchanged with a warning.
    """
    h, w = image.shape
    margin = 0
    while (h - 2 * margin) > 2 and (w - 2 * margin) > 2 and _ring_is_white(image, margin):
        margin += 1
    if margin == 0:
        return image
    if (h - 2 * margin) < MIN_CROP or (w - 2 * margin) < MIN_CROP:
        warnings.warn("border removal would leave a degenerate crop; skipped",
                      DegenerateCropWarning)
        return image
    return image[margin : h - margin, margin : w - margin]


def _foreground_mask(image: np.ndarray) -> np.ndarray | None:
    as_u8 = np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8)
    if int(as_u8.max()) == int(as_u8.min()):
        return None
    _, mask = cv2.threshold(as_u8, 0, 255, cv2.THRESH_BINARY + cv2.THRESH_OTSU)
    if int(np.count_nonzero(mask)) < 4:
        return None
    return mask


def measure_tilt(image: np.ndarray) -> float | None:
    """Tilt of the foreground's min-area rectangle, folded into (-45, 45].

    Returns the rotation (in ``rotate_image`` degrees) that axis-aligns the
    rectangle, preferring the long side vertical when both orientations
    are reachable; None when there is no usable foreground.
    """
    mask = _foreground_mask(image)
    if mask is None:
        return None
    ys, xs = np.nonzero(mask)
    points = np.column_stack([xs, ys]).astype(np.float32)
    rect = cv2.minAreaRect(points)
    box = cv2.boxPoints(rect)
    e1 = box[1] - box[0]
    e2 = box[2] - box[1]
    long_edge = e1 if np.linalg.norm(e1) >= np.linalg.norm(e2) else e2
    # angle of the long edge vs x axis; rotating the image by theta
    # subtracts theta from angles measured this way
    phi = math.degrees(math.atan2(float(long_edge[1]), float(long_edge[0])))
    theta_vertical = math.remainder(phi - 90.0, 180.0)
    if -45.0 < theta_vertical <= 45.0:
        return theta_vertical
    return math.remainder(theta_vertical, 90.0)


def normalize_rotation(image: np.ndarray) -> np.ndarray:
    """Rotate so the foreground's min-area rectangle is axis-aligned.

    The rotation is restricted to (-45, 45] degrees.  A rotation is kept
    only when the re-measured tilt afterwards falls below the alignment
    tolerance; contents whose min-area rectangle has no stable orientation
    (near-square hulls) fail that check and are returned unchanged, which
    makes repeated application a no-op.  Images without foreground are
    returned unchanged with a warning.
    """
    theta = measure_tilt(image)
    if theta is None:
        warnings.warn("no foreground found; rotation left unchanged",
                      NoForegroundWarning)
        return image
    if abs(theta) < ALIGN_TOL_DEG:
        return image
    rotated = np.clip(rotate_image(image, theta), 0.0, 1.0)
    residual = measure_tilt(rotated)
    if residual is None or abs(residual) >= ALIGN_TOL_DEG:
        return image
    return rotated


def clean(image: np.ndarray) -> np.ndarray:
    """remove_border followed by normalize_rotation."""
    return normalize_rotation(remove_border(image))
