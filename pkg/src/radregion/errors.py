"""Exception and warning taxonomy shared across the package."""

from __future__ import annotations


class RadRegionError(Exception):
    """Base class for all package errors."""


# --- dataset / manifest -------------------------------------------------

class MissingFile(RadRegionError):
    pass


class MalformedRow(RadRegionError):
    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class UnknownLabel(RadRegionError):
    def __init__(self, name: str):
        super().__init__(f"unknown region label: {name!r}")
        self.name = name


class DuplicateId(RadRegionError):
    pass


class RatioSumInvalid(RadRegionError):
    pass


class EmptyClass(RadRegionError):
    def __init__(self, region):
        super().__init__(f"class {region.name} has too few records to split")
        self.region = region


class UnknownSplit(RadRegionError):
    pass


class UnwritableOutputDir(RadRegionError):
    pass


# --- losses / models ----------------------------------------------------

class DegenerateProjection(RadRegionError):
    pass


class ShapeMismatch(RadRegionError):
    pass


class NoPositivesAnywhere(RadRegionError):
    pass


class NaNLoss(RadRegionError):
    pass


class BackboneMutated(RadRegionError):
    pass


class FractionTooSmall(RadRegionError):
    pass


# --- evaluation / audit --------------------------------------------------

class EmptySplit(RadRegionError):
    pass


class IdMismatch(RadRegionError):
    pass


class MissingLabel(RadRegionError):
    def __init__(self, record_id: str):
        super().__init__(f"no reference label for record {record_id!r}")
        self.record_id = record_id


class VerdictForUnflaggedRecord(RadRegionError):
    pass


class UnknownCandidate(RadRegionError):
    pass


class InvalidVerdict(RadRegionError):
    pass


class InvalidClass(RadRegionError):
    pass


# --- warnings -------------------------------------------------------------

class DegenerateCropWarning(UserWarning):
    """Border removal would leave less than 8x8 pixels; input returned unchanged."""


class NoForegroundWarning(UserWarning):
    """Rotation normalization found no foreground; input returned unchanged."""


class ImageTooSmallWarning(UserWarning):
    """Image too small for gauge insertion; insertion skipped."""


class UntrainedModelWarning(UserWarning):
    """Attribution requested from an untrained model; result is meaningless."""
