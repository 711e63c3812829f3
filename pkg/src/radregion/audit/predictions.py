"""Per-record model outputs: softmax probabilities and the argmax call."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from radregion.errors import ShapeMismatch
from radregion.regions import NUM_REGIONS, AnatomicalRegion


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class PredictionSet:
    ids: tuple[str, ...]
    probs: np.ndarray            # (N, 14), rows sum to 1
    archive_labels: np.ndarray   # (N,) int codes
    model_tag: str = ""
    logits: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.ids)
        if self.probs.shape != (n, NUM_REGIONS):
            raise ShapeMismatch(f"probs must be ({n}, {NUM_REGIONS})")
        if self.archive_labels.shape != (n,):
            raise ShapeMismatch(f"archive_labels must be ({n},)")
        sums = self.probs.sum(axis=1)
        if n and float(np.abs(sums - 1.0).max()) > 1e-6:
            raise ValueError("probability rows must sum to 1 within 1e-6")

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def predicted(self) -> np.ndarray:
        # argmax; numpy takes the first maximum, i.e. the lowest region code
        return self.probs.argmax(axis=1)

    @classmethod
    def from_logits(cls, ids, logits: np.ndarray, archive_labels: np.ndarray,
                    model_tag: str = "") -> "PredictionSet":
        logits = np.asarray(logits, dtype=np.float64)
        return cls(ids=tuple(ids), probs=softmax(logits),
                   archive_labels=np.asarray(archive_labels, dtype=np.int64),
                   model_tag=model_tag, logits=logits)

    def index_of(self) -> dict[str, int]:
        return {rid: i for i, rid in enumerate(self.ids)}

    # --- CSV: id, label, p0..p13, prediction ------------------------------

    def save_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["id", "label"]
                + [f"p_{r.name}" for r in AnatomicalRegion]
                + ["prediction"]
            )
            pred = self.predicted
            for i, rid in enumerate(self.ids):
                writer.writerow(
                    [rid, AnatomicalRegion(int(self.archive_labels[i])).name]
                    + [f"{p:.10g}" for p in self.probs[i]]
                    + [AnatomicalRegion(int(pred[i])).name]
                )

    @classmethod
    def load_csv(cls, path: str | Path, model_tag: str = "") -> "PredictionSet":
        ids, probs, labels = [], [], []
        with Path(path).open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[:2] != ["id", "label"]:
                raise ValueError(f"unexpected prediction CSV header in {path}")
            for row in reader:
                if not row:
                    continue
                ids.append(row[0])
                labels.append(int(AnatomicalRegion.from_name(row[1])))
                probs.append([float(v) for v in row[2 : 2 + NUM_REGIONS]])
        return cls(
            ids=tuple(ids),
            probs=np.asarray(probs, dtype=np.float64),
            archive_labels=np.asarray(labels, dtype=np.int64),
            model_tag=model_tag or Path(path).stem,
        )
