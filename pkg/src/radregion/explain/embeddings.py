"""Raw embedding export for external projection/visualization tools."""

from __future__ import annotations

import csv
from pathlib import Path

from radregion.data.index import RadiographRecord
from radregion.errors import EmptySplit
from radregion.training.encoder import EMBED_WIDTH, EncoderCheckpoint, encode
from radregion.training.loader import ImageStore, plain_batch


def export_embeddings(
    checkpoint: EncoderCheckpoint,
    store: ImageStore,
    records: list[RadiographRecord],
    path: str | Path,
    input_size: int,
) -> int:
    """CSV of (id, archive label, 512 embedding values); returns row count."""
    if not records:
        raise EmptySplit("no records to embed")
    emb = encode(checkpoint, plain_batch(store, list(records), input_size)).numpy()
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label"] + [f"e{j:03d}" for j in range(EMBED_WIDTH)])
        for rec, row in zip(records, emb):
            writer.writerow([rec.id, rec.archive_label.name]
                            + [f"{v:.8e}" for v in row])
    return len(records)
