"""Accuracy reports, confusion matrices, and their deltas.

Orientation is fixed repo-wide: rows are the reference labels, columns
the model predictions.  Overall accuracy is always trace / total.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from radregion.audit.predictions import PredictionSet
from radregion.errors import EmptySplit, MissingLabel, ShapeMismatch
from radregion.regions import NUM_REGIONS, AnatomicalRegion


@dataclass(frozen=True)
class AccuracyReport:
    overall: float
    per_region: np.ndarray      # recall per reference class; nan when absent
    n_scored: int
    model_tag: str = ""

    def as_dict(self) -> dict:
        return {
            "overall": self.overall,
            "n_scored": self.n_scored,
            "model_tag": self.model_tag,
            "per_region": {
                r.name: (None if np.isnan(self.per_region[int(r)])
                         else float(self.per_region[int(r)]))
                for r in AnatomicalRegion
            },
        }


def _reference_array(pred: PredictionSet, reference) -> np.ndarray:
    if reference is None:
        return pred.archive_labels
    if isinstance(reference, dict):
        out = np.empty(len(pred), dtype=np.int64)
        for i, rid in enumerate(pred.ids):
            if rid not in reference:
                raise MissingLabel(rid)
            out[i] = int(reference[rid])
        return out
    reference = np.asarray(reference, dtype=np.int64)
    if reference.shape != (len(pred),):
        raise ShapeMismatch("reference labels must align with predictions")
    return reference


def confusion_matrix(pred: PredictionSet, reference=None) -> np.ndarray:
    """14x14 counts; rows = reference labels, columns = predictions."""
    ref = _reference_array(pred, reference)
    cm = np.zeros((NUM_REGIONS, NUM_REGIONS), dtype=np.int64)
    np.add.at(cm, (ref, pred.predicted), 1)
    return cm


def cm_delta(cm_new: np.ndarray, cm_old: np.ndarray) -> np.ndarray:
    if cm_new.shape != cm_old.shape:
        raise ShapeMismatch("confusion matrices must share a shape")
    return cm_new.astype(np.int64) - cm_old.astype(np.int64)


def accuracy_report(pred: PredictionSet, reference=None) -> AccuracyReport:
    if len(pred) == 0:
        raise EmptySplit("no records to score")
    cm = confusion_matrix(pred, reference)
    row_totals = cm.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        per_region = np.where(row_totals > 0, np.diag(cm) / row_totals, np.nan)
    return AccuracyReport(
        overall=float(np.trace(cm) / cm.sum()),
        per_region=per_region,
        n_scored=int(cm.sum()),
        model_tag=pred.model_tag,
    )


def render_confusion_png(cm: np.ndarray, path, title: str = "") -> None:
    """Heatmap rendering for reports; counts annotated when legible."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 6))
    im = ax.imshow(cm, cmap="RdBu_r" if cm.min() < 0 else "Blues")
    names = [r.name for r in AnatomicalRegion]
    ax.set_xticks(range(NUM_REGIONS), names, rotation=90, fontsize=7)
    ax.set_yticks(range(NUM_REGIONS), names, fontsize=7)
    ax.set_xlabel("predicted")
    ax.set_ylabel("reference")
    if title:
        ax.set_title(title)
    if NUM_REGIONS <= 20:
        vmax = max(1, int(np.abs(cm).max()))
        for i in range(NUM_REGIONS):
            for j in range(NUM_REGIONS):
                v = int(cm[i, j])
                if v:
                    ax.text(j, i, str(v), ha="center", va="center", fontsize=5,
                            color="white" if abs(v) > vmax * 0.5 else "black")
    fig.colorbar(im, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
