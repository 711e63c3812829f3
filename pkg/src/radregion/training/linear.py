"""Frozen-backbone linear evaluation.

A single fully connected layer (512 -> 14, with bias) is fit with
cross-entropy and Adam, no weight decay, cosine-annealed learning rate
from 5e-2.  The backbone is frozen; any parameter change is a hard
failure, checked bit-for-bit after training.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from radregion.data.index import RadiographRecord
from radregion.errors import BackboneMutated, EmptySplit
from radregion.imaging.gauges import GaugeTemplate
from radregion.imaging.profiles import TRAIN, AugmentationProfile
from radregion.regions import NUM_REGIONS
from radregion.training.config import LinearEvalConfig, cosine_lr
from radregion.training.encoder import EMBED_WIDTH, EncoderCheckpoint, encode
from radregion.training.loader import (
    ImageStore,
    augmented_batch,
    epoch_order,
    labels_tensor,
    plain_batch,
)

logger = logging.getLogger(__name__)


class LinearHead(nn.Linear):
    def __init__(self):
        super().__init__(EMBED_WIDTH, NUM_REGIONS, bias=True)


@dataclass
class LinearEvalResult:
    head: LinearHead
    train_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    best_val_accuracy: float = 0.0


def _state_snapshot(model: nn.Module) -> list[torch.Tensor]:
    return [p.detach().clone() for p in model.parameters()]


def _states_equal(a: list[torch.Tensor], b: list[torch.Tensor]) -> bool:
    return all(torch.equal(x, y) for x, y in zip(a, b))


def train_linear_head(
    checkpoint: EncoderCheckpoint,
    store: ImageStore,
    labeled: list[RadiographRecord],
    config: LinearEvalConfig,
    val_records: list[RadiographRecord] | None = None,
    profile: AugmentationProfile = TRAIN,
    templates: list[GaugeTemplate] | None = None,
) -> LinearEvalResult:
    if not labeled:
        raise EmptySplit("no labeled records for head training")
    torch.manual_seed(config.seed)
    encoder = checkpoint.model
    encoder.eval()
    for p in encoder.parameters():
        p.requires_grad_(False)
    before = _state_snapshot(encoder)

    head = LinearHead()
    opt = torch.optim.Adam(head.parameters(), lr=config.learning_rate,
                           weight_decay=config.weight_decay)
    result = LinearEvalResult(head=head)

    val_emb = val_labels = None
    if val_records:
        val_emb = encode(encoder, plain_batch(store, list(val_records), config.input_size))
        val_labels = labels_tensor(list(val_records))

    best_state = None
    best_acc, stale = -1.0, 0
    records = tuple(labeled)
    for epoch in range(config.epochs):
        lr = cosine_lr(config.learning_rate, epoch, config.epochs)
        for group in opt.param_groups:
            group["lr"] = lr
        order = epoch_order(records, config.seed, epoch)
        losses = []
        head.train()
        for start in range(0, len(order), config.batch_size):
            batch = [records[i] for i in order[start : start + config.batch_size]]
            if config.augment:
                x = augmented_batch(store, batch, config.seed, epoch, profile,
                                    config.input_size, templates)
            else:
                x = plain_batch(store, batch, config.input_size)
            with torch.no_grad():
                emb = encode(encoder, x)
            opt.zero_grad()
            loss = nn.functional.cross_entropy(head(emb), labels_tensor(batch))
            loss.backward()
            opt.step()
            losses.append(float(loss.detach()))
        result.train_loss.append(float(np.mean(losses)))

        if val_emb is not None:
            head.eval()
            with torch.no_grad():
                acc = float((head(val_emb).argmax(1) == val_labels).float().mean())
            result.val_accuracy.append(acc)
            if acc > best_acc:
                best_acc, stale = acc, 0
                best_state = {k: v.clone() for k, v in head.state_dict().items()}
            else:
                stale += 1
                if stale >= config.early_stop_patience:
                    logger.info("linear eval: early stop at epoch %d (best %.3f)",
                                epoch, best_acc)
                    break

    if best_state is not None:
        head.load_state_dict(best_state)
        result.best_val_accuracy = best_acc
    head.eval()

    if not _states_equal(before, _state_snapshot(encoder)):
        raise BackboneMutated("backbone parameters changed during head training")
    return result


def predict_records(
    checkpoint: EncoderCheckpoint,
    head: LinearHead,
    store: ImageStore,
    records: list[RadiographRecord],
    input_size: int,
    model_tag: str = "",
):
    """Eval-mode logits over plain (non-augmented) images -> PredictionSet."""
    from radregion.audit.predictions import PredictionSet

    if not records:
        raise EmptySplit("no records to predict")
    head.eval()
    with torch.no_grad():
        emb = encode(checkpoint, plain_batch(store, list(records), input_size))
        logits = head(emb).numpy()
    return PredictionSet.from_logits(
        ids=tuple(r.id for r in records),
        logits=logits,
        archive_labels=np.array([int(r.archive_label) for r in records]),
        model_tag=model_tag or checkpoint.method,
    )
