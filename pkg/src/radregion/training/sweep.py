"""Label-fraction sweep: linear evaluation at increasing label budgets."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from radregion.data.index import DatasetIndex
from radregion.training.config import LinearEvalConfig
from radregion.training.encoder import EncoderCheckpoint
from radregion.training.linear import predict_records, train_linear_head
from radregion.training.loader import ImageStore
from radregion.training.subsample import subsample_labels

logger = logging.getLogger(__name__)


@dataclass
class SweepRow:
    method: str
    fraction: float
    seed: int
    n_labeled: int
    test_accuracy: float


def low_data_sweep(
    checkpoints: dict[str, EncoderCheckpoint],
    index: DatasetIndex,
    store: ImageStore,
    fractions: list[float],
    seeds: list[int],
    config: LinearEvalConfig,
    out_csv: str | Path | None = None,
    out_plot: str | Path | None = None,
) -> list[SweepRow]:
    if sorted(fractions) != list(fractions):
        raise ValueError("fractions must be sorted ascending")
    val = list(index.split_records("val"))
    test = list(index.split_records("test"))
    rows: list[SweepRow] = []
    for method, ckpt in checkpoints.items():
        for fraction in fractions:
            for seed in seeds:
                subset = subsample_labels(index, fraction, seed)
                res = train_linear_head(
                    ckpt, store, subset, replace(config, seed=seed),
                    val_records=val,
                )
                preds = predict_records(ckpt, res.head, store, test,
                                        config.input_size, model_tag=method)
                acc = float((preds.predicted == preds.archive_labels).mean())
                rows.append(SweepRow(method, fraction, seed, len(subset), acc))
                logger.info("sweep %s f=%.3g seed=%d: acc %.3f",
                            method, fraction, seed, acc)

    if out_csv:
        _write_csv(rows, out_csv)
    if out_plot:
        _write_plot(rows, out_plot)
    return rows


def aggregate(rows: list[SweepRow]) -> dict[tuple[str, float], tuple[float, float]]:
    """(method, fraction) -> (mean accuracy, sd over seeds)."""
    out: dict[tuple[str, float], tuple[float, float]] = {}
    keys = {(r.method, r.fraction) for r in rows}
    for key in sorted(keys):
        accs = [r.test_accuracy for r in rows if (r.method, r.fraction) == key]
        out[key] = (float(np.mean(accs)), float(np.std(accs)))
    return out


def _write_csv(rows: list[SweepRow], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "fraction", "seed", "n_labeled", "test_accuracy"])
        for r in rows:
            writer.writerow([r.method, r.fraction, r.seed, r.n_labeled,
                             f"{r.test_accuracy:.6f}"])


def _write_plot(rows: list[SweepRow], path: str | Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    stats = aggregate(rows)
    fig, ax = plt.subplots(figsize=(6, 4))
    for method in sorted({r.method for r in rows}):
        pts = sorted((f, *stats[(method, f)]) for m, f in stats if m == method)
        xs = [p[0] for p in pts]
        means = [p[1] for p in pts]
        sds = [p[2] for p in pts]
        ax.errorbar(xs, means, yerr=sds, marker="o", capsize=3, label=method)
    ax.set_xscale("log")
    ax.set_xlabel("labeled fraction of the train split")
    ax.set_ylabel("test accuracy")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
