"""The three pretraining loops sharing one batch/optimizer skeleton.

Per step: sample batch -> two augmented views per image -> encode ->
project (-> predict on the online branch for the EMA method) -> loss ->
Adam step (-> EMA target update).  Labels are consumed only by the
label-extended contrastive objective.  The returned checkpoint holds the
online encoder.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from radregion.data.index import DatasetIndex
from radregion.errors import NaNLoss
from radregion.imaging.gauges import GaugeTemplate
from radregion.imaging.profiles import PRETRAIN, AugmentationProfile
from radregion.ssl.ema import EmaState, ema_update
from radregion.ssl.heads import PredictionHead, ProjectionHead
from radregion.ssl.losses import byol_symmetric_loss, nt_xent, supcon_loss
from radregion.training.config import TrainConfig, cosine_lr
from radregion.training.encoder import Encoder, EncoderCheckpoint, build_encoder, encode
from radregion.training.loader import (
    ImageStore,
    epoch_order,
    labels_tensor,
    plain_batch,
    view_pair_batch,
)

logger = logging.getLogger(__name__)


@dataclass
class PretrainResult:
    checkpoint: EncoderCheckpoint
    loss_curve: list[tuple[int, float]] = field(default_factory=list)
    probe_curve: list[tuple[int, float, float]] = field(default_factory=list)  # epoch, pool, low
    stopped_early: bool = False
    ema_state: EmaState | None = None
    target_distance_initial: float | None = None
    target_distance_final: float | None = None


def _param_distance(state: EmaState) -> float:
    with torch.no_grad():
        total = sum(float(((o - t) ** 2).sum()) for o, t in zip(state.online, state.target))
    return math.sqrt(total)


def quick_probe_acc(
    train_emb: torch.Tensor,
    train_labels: torch.Tensor,
    val_emb: torch.Tensor,
    val_labels: torch.Tensor,
    steps: int = 150,
) -> float:
    """Cheap full-batch logistic probe used as a pretraining diagnostic."""
    mu, sd = train_emb.mean(0, keepdim=True), train_emb.std(0, keepdim=True) + 1e-6
    xt, xv = (train_emb - mu) / sd, (val_emb - mu) / sd
    head = torch.nn.Linear(xt.shape[1], 14)
    opt = torch.optim.Adam(head.parameters(), lr=0.02)
    for _ in range(steps):
        opt.zero_grad()
        loss = torch.nn.functional.cross_entropy(head(xt), train_labels)
        loss.backward()
        opt.step()
    with torch.no_grad():
        pred = head(xv).argmax(dim=1)
    return float((pred == val_labels).float().mean())


def _probe_pools(train_recs, config: TrainConfig):
    """Fixed probe-fit subsets: a per-class pool and a 1%-style sliver."""
    by_class: dict[int, list] = {}
    for rec in train_recs:
        by_class.setdefault(int(rec.archive_label), []).append(rec)
    pool, low = [], []
    low_per_class = max(1, round(config.probe_low_fraction * len(train_recs) / max(1, len(by_class))))
    for code in sorted(by_class):
        recs = by_class[code]
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, 733, code]))
        order = rng.permutation(len(recs))
        pool.extend(recs[i] for i in order[: config.probe_pool_per_class])
        low.extend(recs[i] for i in order[:low_per_class])
    return pool, low


def _probe(model: Encoder, store, fit_recs, val_emb, val_labels, size: int) -> float:
    was_training = model.training
    model.eval()
    with torch.no_grad():
        xt = encode(model, plain_batch(store, list(fit_recs), size))
    if was_training:
        model.train()
    return quick_probe_acc(xt, labels_tensor(list(fit_recs)), val_emb, val_labels)


def pretrain(
    method: str,
    index: DatasetIndex,
    store: ImageStore,
    config: TrainConfig,
    profile: AugmentationProfile = PRETRAIN,
    templates: list[GaugeTemplate] | None = None,
    checkpoint_dir: str | Path | None = None,
) -> PretrainResult:
    if method not in ("simclr", "byol", "supcon"):
        raise ValueError(f"unknown pretraining method {method!r}")
    if config.deterministic:
        torch.set_num_threads(1)
    torch.manual_seed(config.seed)

    train_recs = index.split_records("train")
    val_recs = index.split_records("val")
    if not train_recs:
        raise ValueError("train split is empty")

    encoder = build_encoder(config.seed)
    projector = ProjectionHead()
    modules: list[torch.nn.Module] = [encoder, projector]

    predictor = None
    target_encoder = target_projector = None
    ema_state = None
    steps_per_epoch = max(1, math.ceil(len(train_recs) / config.batch_size))
    if method == "byol":
        predictor = PredictionHead()
        modules.append(predictor)
        # independent target init; the EMA pulls it toward the online branch
        target_encoder = build_encoder(config.seed + 1)
        target_projector = ProjectionHead()
        for p in target_encoder.parameters():
            p.requires_grad_(False)
        for p in target_projector.parameters():
            p.requires_grad_(False)
        ema_state = EmaState(
            online=list(encoder.parameters()) + list(projector.parameters()),
            target=list(target_encoder.parameters()) + list(target_projector.parameters()),
            tau_base=config.tau_base,
            step=0,
            total_steps=config.epochs * steps_per_epoch,
        )
        target_encoder.train()
        target_projector.train()

    params = [p for m in modules for p in m.parameters()]
    opt = torch.optim.Adam(params, lr=config.learning_rate,
                           weight_decay=config.weight_decay)
    for m in modules:
        m.train()

    result = EncoderCheckpoint(model=encoder, method=method,
                               config=config.to_dict(), epochs=0)
    out = PretrainResult(checkpoint=result)
    if ema_state is not None:
        out.target_distance_initial = _param_distance(ema_state)

    for epoch in range(config.epochs):
        lr = cosine_lr(config.learning_rate, epoch, config.epochs)
        for group in opt.param_groups:
            group["lr"] = lr

        order = epoch_order(train_recs, config.seed, epoch)
        epoch_losses = []
        for start in range(0, len(order), config.batch_size):
            batch_recs = [train_recs[i] for i in order[start : start + config.batch_size]]
            if len(batch_recs) < 2:
                continue
            va, vb = view_pair_batch(store, batch_recs, config.seed, epoch,
                                     profile, config.input_size, templates)
            opt.zero_grad()
            if method == "byol":
                q_a = predictor(projector(encoder(va)))
                q_b = predictor(projector(encoder(vb)))
                with torch.no_grad():
                    t_a = target_projector(target_encoder(va))
                    t_b = target_projector(target_encoder(vb))
                loss = byol_symmetric_loss(q_a, t_b, q_b, t_a)
            else:
                z = projector(encoder(torch.cat([va, vb], dim=0)))
                if method == "simclr":
                    loss = nt_xent(z, config.temperature)
                else:
                    loss = supcon_loss(z, labels_tensor(batch_recs),
                                       config.supcon_temperature)
            if not torch.isfinite(loss):
                raise NaNLoss(
                    f"{method} loss became non-finite at epoch {epoch} "
                    f"(lr={lr:.2e}, batch={len(batch_recs)})"
                )
            loss.backward()
            opt.step()
            if ema_state is not None:
                ema_state = ema_update(ema_state)
            epoch_losses.append(float(loss.detach()))

        mean_loss = float(np.mean(epoch_losses)) if epoch_losses else float("nan")
        out.loss_curve.append((epoch, mean_loss))
        result.epochs = epoch + 1
        logger.info("%s epoch %d: loss %.4f (lr %.2e)", method, epoch, mean_loss, lr)

        if checkpoint_dir and config.checkpoint_every and \
                (epoch + 1) % config.checkpoint_every == 0:
            result.save(Path(checkpoint_dir) / f"{method}_epoch{epoch + 1:04d}.pt")

        if config.probe_every and val_recs and (epoch + 1) % config.probe_every == 0:
            pool_recs, low_recs = _probe_pools(train_recs, config)
            was_training = encoder.training
            encoder.eval()
            with torch.no_grad():
                val_emb = encode(encoder, plain_batch(store, list(val_recs),
                                                      config.input_size))
            if was_training:
                encoder.train()
            val_labels = labels_tensor(list(val_recs))
            pool_acc = _probe(encoder, store, pool_recs, val_emb, val_labels,
                              config.input_size)
            low_acc = _probe(encoder, store, low_recs, val_emb, val_labels,
                             config.input_size)
            out.probe_curve.append((epoch + 1, pool_acc, low_acc))
            logger.info("%s epoch %d: probe pool %.3f low %.3f",
                        method, epoch, pool_acc, low_acc)
            pool_ok = config.probe_stop_acc is None or pool_acc >= config.probe_stop_acc
            low_ok = (config.probe_stop_low_acc is None
                      or low_acc >= config.probe_stop_low_acc)
            if (config.probe_stop_acc or config.probe_stop_low_acc) \
                    and pool_ok and low_ok:
                out.stopped_early = True
                break

    encoder.eval()
    if checkpoint_dir:
        result.save(Path(checkpoint_dir) / f"{method}_final.pt")
    if ema_state is not None:
        out.ema_state = ema_state
        out.target_distance_final = _param_distance(ema_state)
    return out
