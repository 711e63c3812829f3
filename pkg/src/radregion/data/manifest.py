"""CSV manifest ingestion: header ``id,path,label,split``.

Labels are canonical lowercase region names; the split column may be
empty, in which case the record is left unassigned.
"""

from __future__ import annotations

import csv
from pathlib import Path

from radregion.data.index import SPLITS, DatasetIndex, RadiographRecord
from radregion.errors import MalformedRow, MissingFile
from radregion.regions import AnatomicalRegion

MANIFEST_HEADER = ["id", "path", "label", "split"]


def load_manifest(path: str | Path, resolve_relative: bool = True) -> DatasetIndex:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"manifest not found: {path}")

    records: list[RadiographRecord] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)

    if not rows:
        return DatasetIndex()

    start = 0
    if [c.strip().lower() for c in rows[0]] == MANIFEST_HEADER:
        start = 1

    for lineno, row in enumerate(rows[start:], start=start + 1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 3:
            raise MalformedRow(lineno, f"expected at least 3 columns, got {len(row)}")
        rec_id, img_path, label = (c.strip() for c in row[:3])
        split = row[3].strip() if len(row) > 3 and row[3].strip() else None
        if not rec_id or not img_path:
            raise MalformedRow(lineno, "empty id or path")
        if split is not None and split not in SPLITS:
            raise MalformedRow(lineno, f"unknown split {split!r}")
        if resolve_relative and not Path(img_path).is_absolute():
            img_path = str(path.parent / img_path)
        records.append(
            RadiographRecord(
                id=rec_id,
                image_ref=img_path,
                archive_label=AnatomicalRegion.from_name(label),
                split=split,
            )
        )
    return DatasetIndex(records=tuple(records))


def save_manifest(index: DatasetIndex, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for r in index:
            ref = Path(r.image_ref)
            try:
                ref = ref.relative_to(path.parent.resolve())
            except ValueError:
                try:
                    ref = ref.relative_to(path.parent)
                except ValueError:
                    pass
            writer.writerow([r.id, str(ref), r.archive_label.name, r.split or ""])
