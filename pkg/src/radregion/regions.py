"""The 14 anatomical region classes and their fixed integer codes."""

from __future__ import annotations

import enum

from radregion.errors import UnknownLabel


class AnatomicalRegion(enum.IntEnum):
    """Region taxonomy; codes 0-13 are stable across the whole repo."""

    clavicle = 0
    shoulder = 1
    skull = 2
    rib = 3
    elbow = 4
    knee = 5
    wrist = 6
    hand = 7
    foot = 8
    ankle = 9
    pelvis_hip = 10
    cervical_spine = 11
    thoracic_spine = 12
    lumbar_spine = 13

    @classmethod
    def from_name(cls, name: str) -> "AnatomicalRegion":
        try:
            return cls[name.strip().lower()]
        except KeyError:
            raise UnknownLabel(name) from None

    @classmethod
    def from_code(cls, code: int) -> "AnatomicalRegion":
        try:
            return cls(code)
        except ValueError:
            raise UnknownLabel(str(code)) from None


NUM_REGIONS = len(AnatomicalRegion)

REGION_NAMES = tuple(r.name for r in AnatomicalRegion)
