"""Synthetic audit fixture reproducing the full-scale review arithmetic.

The real 9,746-image test split is unavailable, but the audit bookkeeping
is pure arithmetic over counts, so a deterministic stand-in prediction set
with the exact review outcome counts makes the corrected-accuracy and
delta-matrix identities unit-testable: 9,746 records, 328 mismatches,
116 relabels of which 98 match the model, 36 out-of-domain, 2 unusable.
"""

from __future__ import annotations

import numpy as np

from radregion.audit.predictions import PredictionSet
from radregion.audit.verdicts import Verdict
from radregion.reference import ARCHIVE_SPLIT_COUNTS, AUDIT_COUNTS
from radregion.regions import NUM_REGIONS


def archive_audit_fixture(seed: int = 20230) -> tuple[PredictionSet, list[Verdict]]:
    """Prediction set + the 154 non-confirming verdicts of the fixture."""
    rng = np.random.default_rng(seed)
    counts = AUDIT_COUNTS

    archive = np.concatenate([
        np.full(splits[2], int(region), dtype=np.int64)
        for region, splits in ARCHIVE_SPLIT_COUNTS.items()
    ])
    n = archive.shape[0]
    assert n == counts["test_records"]

    predicted = archive.copy()
    mismatch_idx = rng.choice(n, size=counts["mismatches"], replace=False)
    for i in mismatch_idx:
        offset = int(rng.integers(1, NUM_REGIONS))
        predicted[i] = (archive[i] + offset) % NUM_REGIONS

    confidence = rng.uniform(0.55, 0.99, size=n)
    probs = np.empty((n, NUM_REGIONS), dtype=np.float64)
    for i in range(n):
        probs[i] = (1.0 - confidence[i]) / (NUM_REGIONS - 1)
        probs[i, predicted[i]] = confidence[i]

    ids = tuple(f"fx-{i:06d}" for i in range(n))
    pred = PredictionSet(ids=ids, probs=probs, archive_labels=archive,
                         model_tag="simclr-fixture")

    order = rng.permutation(mismatch_idx)
    n_match = counts["relabels_matching_prediction"]
    n_third = counts["relabeled"] - n_match
    n_ood = counts["out_of_domain"]
    n_bad = counts["unusable"]

    verdicts: list[Verdict] = []
    cursor = 0
    for i in order[cursor : cursor + n_match]:
        verdicts.append(Verdict(candidate_id=ids[i], decision="relabel",
                                relabel_to=int(predicted[i]), reviewer="fixture"))
    cursor += n_match
    for i in order[cursor : cursor + n_third]:
        third = next(
            c for c in range(NUM_REGIONS)
            if c != int(archive[i]) and c != int(predicted[i])
        )
        verdicts.append(Verdict(candidate_id=ids[i], decision="relabel",
                                relabel_to=third, reviewer="fixture"))
    cursor += n_third
    for i in order[cursor : cursor + n_ood]:
        verdicts.append(Verdict(candidate_id=ids[i], decision="out_of_domain",
                                reviewer="fixture"))
    cursor += n_ood
    for i in order[cursor : cursor + n_bad]:
        verdicts.append(Verdict(candidate_id=ids[i], decision="unusable",
                                reviewer="fixture"))
    return pred, verdicts
