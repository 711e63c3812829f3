"""Stratified label subsampling with nested subsets across fractions.

Class budgets come from a divisor (odd-number) apportionment seeded with
one guaranteed slot per class: as the total budget grows, classes only
ever gain slots, so the 1% subset of a fixed seed is contained in the 10%
subset.  Within a class, records are taken as a prefix of one seeded
shuffle, which gives the nesting for free.
"""

from __future__ import annotations

import heapq

import numpy as np

from radregion.data.index import DatasetIndex, RadiographRecord
from radregion.errors import FractionTooSmall


def _class_budgets(counts: dict[int, int], total: int) -> dict[int, int]:
    budgets = {code: 1 for code in counts}
    remaining = total - len(budgets)
    # priority count/(2k+1) for the k-th extra slot; ties by region code
    heap = [(-counts[code] / 3.0, code, 1) for code in sorted(counts)]
    heapq.heapify(heap)
    while remaining > 0 and heap:
        _, code, k = heapq.heappop(heap)
        if budgets[code] < counts[code]:
            budgets[code] += 1
            remaining -= 1
            heapq.heappush(heap, (-counts[code] / (2 * (k + 1) + 1.0), code, k + 1))
    return budgets


def subsample_labels(
    index: DatasetIndex,
    fraction: float,
    seed: int,
    split: str = "train",
) -> list[RadiographRecord]:
    """Deterministic stratified subset of the split, >= 1 record per class."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    records = index.split_records(split)
    if fraction == 1.0:
        return list(records)

    by_class: dict[int, list[RadiographRecord]] = {}
    for rec in records:
        by_class.setdefault(int(rec.archive_label), []).append(rec)

    n = len(records)
    target = int(np.floor(fraction * n + 0.5))  # round half up
    if target < len(by_class):
        raise FractionTooSmall(
            f"budget {target} cannot cover one record per class ({len(by_class)})"
        )

    counts = {code: len(recs) for code, recs in by_class.items()}
    budgets = _class_budgets(counts, target)

    chosen: list[RadiographRecord] = []
    for code in sorted(by_class):
        recs = by_class[code]
        rng = np.random.default_rng(np.random.SeedSequence([seed, 911, code]))
        order = rng.permutation(len(recs))
        chosen.extend(recs[i] for i in order[: budgets[code]])
    return chosen
