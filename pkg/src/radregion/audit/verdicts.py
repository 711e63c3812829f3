"""Human verdicts on flagged records and the corrected-accuracy arithmetic.

Verdicts live in an append-only JSONL ledger; the active verdict for a
candidate is the last line written for it, with the full history kept.
``apply_verdicts`` removes out-of-domain and unusable records from the
denominator, swaps in relabeled reference labels, and recomputes overall
and per-class accuracy together with the before/after confusion matrices
and their difference.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from radregion.audit.metrics import accuracy_report, cm_delta, confusion_matrix
from radregion.audit.predictions import PredictionSet
from radregion.errors import (
    InvalidVerdict,
    UnknownCandidate,
    VerdictForUnflaggedRecord,
)
from radregion.regions import NUM_REGIONS

DECISIONS = ("archive_correct", "relabel", "out_of_domain", "unusable")


@dataclass(frozen=True)
class Verdict:
    candidate_id: str
    decision: str
    relabel_to: Optional[int] = None
    reviewer: str = ""
    timestamp: str = ""

    def __post_init__(self):
        if self.decision not in DECISIONS:
            raise InvalidVerdict(f"unknown decision {self.decision!r}")
        if self.decision == "relabel":
            if self.relabel_to is None:
                raise InvalidVerdict("relabel verdict needs a target region")
            if not 0 <= int(self.relabel_to) < NUM_REGIONS:
                raise InvalidVerdict(f"relabel target {self.relabel_to} out of range")
        elif self.relabel_to is not None:
            raise InvalidVerdict(f"{self.decision} must not carry a relabel target")

    @classmethod
    def now(cls, candidate_id: str, decision: str, relabel_to: Optional[int] = None,
            reviewer: str = "") -> "Verdict":
        return cls(candidate_id=candidate_id, decision=decision,
                   relabel_to=relabel_to, reviewer=reviewer,
                   timestamp=datetime.now(timezone.utc).isoformat())


class VerdictLedger:
    """Append-only JSONL; reads see a consistent prefix, one writer only."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self.entries: list[Verdict] = []
        if self.path and self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    if line.strip():
                        self.entries.append(Verdict(**json.loads(line)))

    def __len__(self) -> int:
        return len(self.entries)

    def append(self, verdict: Verdict) -> bool:
        """Write one verdict; exact duplicates of the active verdict are
        dropped (idempotent).  Returns True when the ledger changed."""
        current = self.active().get(verdict.candidate_id)
        if current == verdict:
            return False
        self.entries.append(verdict)
        if self.path:
            with self.path.open("a") as fh:
                fh.write(json.dumps(asdict(verdict)) + "\n")
        return True

    def active(self) -> dict[str, Verdict]:
        out: dict[str, Verdict] = {}
        for v in self.entries:
            out[v.candidate_id] = v
        return out

    def history(self, candidate_id: str) -> list[Verdict]:
        return [v for v in self.entries if v.candidate_id == candidate_id]


def record_verdict(
    ledger: VerdictLedger,
    verdict: Verdict,
    candidates: dict[str, int] | None = None,
) -> VerdictLedger:
    """Validated ledger append.

    `candidates` maps flagged record id -> archive label code; when given,
    unknown ids are rejected and relabel targets must differ from the
    archive label.
    """
    if candidates is not None:
        if verdict.candidate_id not in candidates:
            raise UnknownCandidate(verdict.candidate_id)
        if (verdict.decision == "relabel"
                and int(verdict.relabel_to) == int(candidates[verdict.candidate_id])):
            raise InvalidVerdict("relabel target equals the archive label")
    ledger.append(verdict)
    return ledger


@dataclass
class CorrectedEvaluation:
    original_accuracy: float
    corrected_accuracy: float
    n_total: int
    n_kept: int
    n_excluded: int
    n_relabeled: int
    n_relabels_matching_prediction: int
    cm_old: np.ndarray
    cm_new: np.ndarray
    delta: np.ndarray
    per_region_original: np.ndarray = field(default=None)  # type: ignore[assignment]
    per_region_corrected: np.ndarray = field(default=None)  # type: ignore[assignment]

    def summary(self) -> dict:
        return {
            "original_accuracy": self.original_accuracy,
            "corrected_accuracy": self.corrected_accuracy,
            "n_total": self.n_total,
            "n_kept": self.n_kept,
            "n_excluded": self.n_excluded,
            "n_relabeled": self.n_relabeled,
            "n_relabels_matching_prediction": self.n_relabels_matching_prediction,
            "delta_diagonal_sum": int(np.trace(self.delta)),
        }


def apply_verdicts(
    pred: PredictionSet,
    verdicts: dict[str, Verdict] | list[Verdict],
) -> CorrectedEvaluation:
    """Corrected evaluation under the active verdicts.

    Every verdict must reference a flagged record (prediction != archive
    label).  Relabel verdicts replace the reference label only; predictions
    are never touched.  Out-of-domain and unusable records leave the
    denominator entirely.
    """
    if isinstance(verdicts, list):
        active: dict[str, Verdict] = {}
        for v in verdicts:
            active[v.candidate_id] = v
    else:
        active = dict(verdicts)

    predicted = pred.predicted
    pos = pred.index_of()
    flagged = {rid for i, rid in enumerate(pred.ids)
               if int(predicted[i]) != int(pred.archive_labels[i])}
    for rid in active:
        if rid not in pos:
            raise UnknownCandidate(rid)
        if rid not in flagged:
            raise VerdictForUnflaggedRecord(rid)

    reference = pred.archive_labels.copy()
    keep = np.ones(len(pred), dtype=bool)
    n_relabeled = n_match = 0
    for rid, v in active.items():
        i = pos[rid]
        if v.decision in ("out_of_domain", "unusable"):
            keep[i] = False
        elif v.decision == "relabel":
            if int(v.relabel_to) == int(pred.archive_labels[i]):
                raise InvalidVerdict(
                    f"relabel target equals archive label for {rid}")
            reference[i] = int(v.relabel_to)
            n_relabeled += 1
            if int(v.relabel_to) == int(predicted[i]):
                n_match += 1

    cm_old = confusion_matrix(pred)
    report_old = accuracy_report(pred)

    kept_pred = PredictionSet(
        ids=tuple(rid for i, rid in enumerate(pred.ids) if keep[i]),
        probs=pred.probs[keep],
        archive_labels=reference[keep],
        model_tag=pred.model_tag,
    )
    cm_new = confusion_matrix(kept_pred)
    report_new = accuracy_report(kept_pred)

    return CorrectedEvaluation(
        original_accuracy=report_old.overall,
        corrected_accuracy=report_new.overall,
        n_total=len(pred),
        n_kept=int(keep.sum()),
        n_excluded=int((~keep).sum()),
        n_relabeled=n_relabeled,
        n_relabels_matching_prediction=n_match,
        cm_old=cm_old,
        cm_new=cm_new,
        delta=cm_delta(cm_new, cm_old),
        per_region_original=report_old.per_region,
        per_region_corrected=report_new.per_region,
    )
