"""Softmax-sum ensembling: add member probabilities, take the argmax."""

from __future__ import annotations

import numpy as np

from radregion.audit.predictions import PredictionSet
from radregion.errors import IdMismatch


def ensemble_predict(members: list[PredictionSet]) -> PredictionSet:
    """Elementwise sum of member softmax vectors, renormalized for reporting.

    Members must cover the same record ids; later members are aligned to
    the first member's order.  The argmax of the sum is unchanged by the
    renormalization.
    """
    if len(members) < 2:
        raise ValueError("an ensemble needs at least 2 members")
    first = members[0]
    id_set = set(first.ids)
    total = first.probs.copy()
    for other in members[1:]:
        if set(other.ids) != id_set:
            raise IdMismatch("ensemble members must cover identical record ids")
        if not np.array_equal(other.archive_labels[_align(other, first)],
                              first.archive_labels):
            raise IdMismatch("ensemble members disagree on archive labels")
        total += other.probs[_align(other, first)]
    return PredictionSet(
        ids=first.ids,
        probs=total / len(members),
        archive_labels=first.archive_labels,
        model_tag="+".join(m.model_tag or "member" for m in members),
    )


def _align(member: PredictionSet, reference: PredictionSet) -> np.ndarray:
    if member.ids == reference.ids:
        return np.arange(len(member))
    pos = member.index_of()
    return np.array([pos[rid] for rid in reference.ids], dtype=np.int64)
