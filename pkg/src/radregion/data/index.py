"""Dataset index: one record per radiograph, plus per-split class counts.

The index is read-only after construction; operations that change it
(splitting, noise injection) return new indices.  The ``original_label``
field exists only on records touched by noise injection and is never part
of a training-visible view.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np

from radregion.errors import DuplicateId, UnknownSplit
from radregion.regions import NUM_REGIONS, AnatomicalRegion

SPLITS = ("train", "val", "test")
Split = str  # one of SPLITS, or None when unassigned


@dataclass(frozen=True)
class RadiographRecord:
    id: str
    image_ref: str
    archive_label: AnatomicalRegion
    split: Optional[str] = None
    corrupted: Optional[bool] = None
    # set by noise injection only; hidden from training views
    original_label: Optional[AnatomicalRegion] = None

    def with_split(self, split: Optional[str]) -> "RadiographRecord":
        return replace(self, split=split)


@dataclass(frozen=True)
class DatasetIndex:
    records: tuple[RadiographRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            seen, dup = set(), None
            for i in ids:
                if i in seen:
                    dup = i
                    break
                seen.add(i)
            raise DuplicateId(f"duplicate record id: {dup!r}")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[RadiographRecord]:
        return iter(self.records)

    def by_id(self, record_id: str) -> RadiographRecord:
        return self._id_map()[record_id]

    def _id_map(self) -> dict[str, RadiographRecord]:
        # rebuilt on demand; records tuple is immutable so this is safe
        return {r.id: r for r in self.records}

    def split_records(self, split: Optional[str]) -> tuple[RadiographRecord, ...]:
        if split is not None and split not in SPLITS:
            raise UnknownSplit(f"unknown split: {split!r}")
        return tuple(r for r in self.records if r.split == split)

    def class_histogram(self, split: Optional[str]) -> np.ndarray:
        """Per-region record counts for one split (length-14 int vector)."""
        recs = self.split_records(split)
        counts = np.zeros(NUM_REGIONS, dtype=np.int64)
        for r in recs:
            counts[int(r.archive_label)] += 1
        return counts

    @property
    def class_counts(self) -> dict[Optional[str], np.ndarray]:
        out: dict[Optional[str], np.ndarray] = {}
        for s in SPLITS:
            out[s] = self.class_histogram(s)
        unassigned = self.class_histogram(None)
        if unassigned.sum():
            out[None] = unassigned
        return out

    def with_records(self, records: Iterable[RadiographRecord]) -> "DatasetIndex":
        return DatasetIndex(records=tuple(records))

    # --- JSONL serialization (one record per line) -----------------------

    def save_jsonl(self, path: str | Path) -> None:
        path = Path(path)
        with path.open("w") as fh:
            for r in self.records:
                row = {
                    "id": r.id,
                    "image_ref": r.image_ref,
                    "archive_label": r.archive_label.name,
                    "split": r.split,
                }
                if r.corrupted is not None:
                    row["corrupted"] = r.corrupted
                if r.original_label is not None:
                    row["original_label"] = r.original_label.name
                fh.write(json.dumps(row) + "\n")

    @classmethod
    def load_jsonl(cls, path: str | Path) -> "DatasetIndex":
        records = []
        with Path(path).open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                records.append(
                    RadiographRecord(
                        id=row["id"],
                        image_ref=row["image_ref"],
                        archive_label=AnatomicalRegion.from_name(row["archive_label"]),
                        split=row.get("split"),
                        corrupted=row.get("corrupted"),
                        original_label=(
                            AnatomicalRegion.from_name(row["original_label"])
                            if row.get("original_label")
                            else None
                        ),
                    )
                )
        return cls(records=tuple(records))


def class_histogram(index: DatasetIndex, split: Optional[str]) -> np.ndarray:
    return index.class_histogram(split)
