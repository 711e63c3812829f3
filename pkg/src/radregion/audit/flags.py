"""Mismatch flagging: one audit candidate per prediction/label disagreement."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from radregion.audit.predictions import PredictionSet
from radregion.regions import AnatomicalRegion


@dataclass(frozen=True)
class AuditCandidate:
    record_id: str
    archive_label: int
    predicted: int
    confidence: float            # softmax of the predicted class
    probs: tuple[float, ...]
    image_ref: Optional[str] = None
    status: str = "pending"      # pending | decided

    def top3(self) -> list[tuple[str, float]]:
        order = np.argsort(self.probs)[::-1][:3]
        return [(AnatomicalRegion(int(i)).name, float(self.probs[i])) for i in order]


def flag_mismatches(
    pred: PredictionSet,
    image_refs: dict[str, str] | None = None,
) -> list[AuditCandidate]:
    """Candidates for every record whose prediction differs from the
    archive label, most confident disagreements first."""
    predicted = pred.predicted
    out = []
    for i, rid in enumerate(pred.ids):
        if int(predicted[i]) == int(pred.archive_labels[i]):
            continue
        out.append(
            AuditCandidate(
                record_id=rid,
                archive_label=int(pred.archive_labels[i]),
                predicted=int(predicted[i]),
                confidence=float(pred.probs[i, predicted[i]]),
                probs=tuple(float(p) for p in pred.probs[i]),
                image_ref=(image_refs or {}).get(rid),
            )
        )
    out.sort(key=lambda c: (-c.confidence, c.record_id))
    return out


def save_candidates(candidates: list[AuditCandidate], path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for c in candidates:
            fh.write(json.dumps(asdict(c)) + "\n")


def load_candidates(path: str | Path) -> list[AuditCandidate]:
    out = []
    with Path(path).open() as fh:
        for line in fh:
            if line.strip():
                row = json.loads(line)
                row["probs"] = tuple(row["probs"])
                out.append(AuditCandidate(**row))
    return out
