"""Fully supervised comparison run: randomly initialized encoder + head,
trained end to end with cross-entropy on the labeled subset only."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from radregion.data.index import RadiographRecord
from radregion.errors import EmptySplit, NaNLoss
from radregion.imaging.gauges import GaugeTemplate
from radregion.imaging.profiles import TRAIN, AugmentationProfile
from radregion.training.config import TrainConfig, cosine_lr
from radregion.training.encoder import EncoderCheckpoint, build_encoder
from radregion.training.linear import LinearHead
from radregion.training.loader import ImageStore, augmented_batch, epoch_order, labels_tensor, plain_batch

logger = logging.getLogger(__name__)


@dataclass
class BaselineResult:
    checkpoint: EncoderCheckpoint
    head: LinearHead
    train_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)


def train_supervised_baseline(
    labeled: list[RadiographRecord],
    store: ImageStore,
    config: TrainConfig,
    val_records: list[RadiographRecord] | None = None,
    profile: AugmentationProfile = TRAIN,
    templates: list[GaugeTemplate] | None = None,
) -> BaselineResult:
    if not labeled:
        raise EmptySplit("no labeled records for supervised baseline")
    torch.manual_seed(config.seed)
    encoder = build_encoder(config.seed)
    head = LinearHead()
    params = list(encoder.parameters()) + list(head.parameters())
    opt = torch.optim.Adam(params, lr=config.learning_rate,
                           weight_decay=config.weight_decay)
    result = BaselineResult(
        checkpoint=EncoderCheckpoint(model=encoder, method="supervised",
                                     config=config.to_dict(), epochs=0),
        head=head,
    )

    val_x = val_labels = None
    if val_records:
        val_x = plain_batch(store, list(val_records), config.input_size)
        val_labels = labels_tensor(list(val_records))

    records = tuple(labeled)
    best_acc, best_states = -1.0, None
    for epoch in range(config.epochs):
        lr = cosine_lr(config.learning_rate, epoch, config.epochs)
        for group in opt.param_groups:
            group["lr"] = lr
        encoder.train()
        head.train()
        order = epoch_order(records, config.seed, epoch)
        losses = []
        for start in range(0, len(order), config.batch_size):
            batch = [records[i] for i in order[start : start + config.batch_size]]
            x = augmented_batch(store, batch, config.seed, epoch, profile,
                                config.input_size, templates)
            opt.zero_grad()
            loss = nn.functional.cross_entropy(head(encoder(x)), labels_tensor(batch))
            if not torch.isfinite(loss):
                raise NaNLoss(f"supervised loss non-finite at epoch {epoch}")
            loss.backward()
            opt.step()
            losses.append(float(loss.detach()))
        result.train_loss.append(float(np.mean(losses)))
        result.checkpoint.epochs = epoch + 1

        if val_x is not None:
            encoder.eval()
            head.eval()
            with torch.no_grad():
                acc = float((head(encoder(val_x)).argmax(1) == val_labels).float().mean())
            result.val_accuracy.append(acc)
            if acc > best_acc:
                best_acc = acc
                best_states = (
                    {k: v.clone() for k, v in encoder.state_dict().items()},
                    {k: v.clone() for k, v in head.state_dict().items()},
                )
        logger.info("supervised epoch %d: loss %.4f", epoch, result.train_loss[-1])

    if best_states is not None:
        encoder.load_state_dict(best_states[0])
        head.load_state_dict(best_states[1])
    encoder.eval()
    head.eval()
    return result
