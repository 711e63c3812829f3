"""Controlled label corruption for audit experiments.

A chosen fraction of records get their archive label replaced by a
uniformly random *different* region.  The original label is kept on the
record for precision/recall measurement but is never exposed to training
code, which only ever reads ``archive_label``.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from radregion.data.index import DatasetIndex
from radregion.regions import NUM_REGIONS, AnatomicalRegion


def num_corrupted(n_records: int, rate: float) -> int:
    # round half up, per the documented counting rule
    return int(np.floor(rate * n_records + 0.5))


def inject_label_noise(index: DatasetIndex, rate: float, seed: int) -> DatasetIndex:
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must be in [0, 1], got {rate}")
    n = len(index)
    k = num_corrupted(n, rate)
    if k == 0:
        return index

    rng = np.random.default_rng(np.random.SeedSequence([seed, n, k]))
    chosen = set(rng.choice(n, size=k, replace=False).tolist())

    new_records = []
    for pos, rec in enumerate(index):
        if pos not in chosen:
            new_records.append(rec)
            continue
        # uniformly random region other than the current one
        offset = int(rng.integers(1, NUM_REGIONS))
        wrong = AnatomicalRegion((int(rec.archive_label) + offset) % NUM_REGIONS)
        new_records.append(
            replace(rec, archive_label=wrong, corrupted=True,
                    original_label=rec.archive_label)
        )
    return index.with_records(new_records)
