"""Stratified train/val/test splitting with exact largest-remainder rounding."""

from __future__ import annotations

import numpy as np

from radregion.data.index import SPLITS, DatasetIndex
from radregion.errors import EmptyClass, RatioSumInvalid
from radregion.regions import AnatomicalRegion

MIN_CLASS_SIZE = 3  # one record per split


def largest_remainder(total: int, fractions: tuple[float, ...]) -> list[int]:
    """Integer allocation of `total` by `fractions`, sums exactly to `total`.

    Remainder ties are broken by position (earlier bucket wins).
    """
    quotas = [total * f for f in fractions]
    floors = [int(np.floor(q)) for q in quotas]
    leftover = total - sum(floors)
    order = sorted(range(len(fractions)), key=lambda i: (-(quotas[i] - floors[i]), i))
    for i in order[:leftover]:
        floors[i] += 1
    return floors


def split_dataset(
    index: DatasetIndex,
    ratios: tuple[float, float, float],
    seed: int,
    allow_reassign: bool = False,
) -> DatasetIndex:
    """Assign every record to train/val/test, stratified per region.

    Each class's records are shuffled deterministically and partitioned in
    the given ratios, rounding by largest remainder so per-class sizes are
    exact.  Classes with fewer than 3 records raise EmptyClass.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise RatioSumInvalid(f"ratios sum to {sum(ratios)!r}, expected 1")
    if not allow_reassign and any(r.split is not None for r in index):
        raise RatioSumInvalid(
            "records already assigned to splits; pass allow_reassign=True to redo"
        )

    by_class: dict[int, list[int]] = {int(r): [] for r in AnatomicalRegion}
    for pos, rec in enumerate(index):
        by_class[int(rec.archive_label)].append(pos)

    assignment: dict[int, str] = {}
    for code in sorted(by_class):
        positions = by_class[code]
        if not positions:
            continue
        if len(positions) < MIN_CLASS_SIZE:
            raise EmptyClass(AnatomicalRegion(code))
        rng = np.random.default_rng(np.random.SeedSequence([seed, code]))
        order = rng.permutation(len(positions))
        sizes = largest_remainder(len(positions), ratios)
        cursor = 0
        for split_name, size in zip(SPLITS, sizes):
            for k in order[cursor : cursor + size]:
                assignment[positions[k]] = split_name
            cursor += size

    new_records = [
        rec.with_split(assignment[pos]) for pos, rec in enumerate(index)
    ]
    return index.with_records(new_records)
