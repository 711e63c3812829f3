"""Training configurations and the cosine learning-rate schedule.

``pretrain_defaults`` returns the full-scale settings used for real
archives (1000 epochs, batch 1024/896).  ``desk_pretrain_config`` is the
overlay for the synthetic desk corpus: 64 px inputs, batch 256, far fewer
epochs, and an optional linear-probe early stop.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path


def cosine_lr(lr0: float, step: int, total: int) -> float:
    """lr0 * (1 + cos(pi * t / T)) / 2, floored at 0."""
    if total <= 0:
        return lr0
    t = min(max(step, 0), total)
    return max(0.0, lr0 * (1.0 + math.cos(math.pi * t / total)) / 2.0)


@dataclass(frozen=True)
class TrainConfig:
    method: str = "simclr"  # simclr | byol | supcon | supervised
    learning_rate: float = 3e-4
    weight_decay: float = 1e-4
    epochs: int = 1000
    batch_size: int = 1024
    input_size: int = 224
    seed: int = 0
    temperature: float = 0.5        # contrastive softmax temperature
    supcon_temperature: float = 0.1
    tau_base: float = 0.9995        # EMA target decay floor
    deterministic: bool = False     # single-threaded bitwise-reproducible mode
    checkpoint_every: int = 0       # epochs between saved checkpoints; 0 = end only
    probe_every: int = 0            # epochs between linear-probe diagnostics
    probe_stop_acc: float | None = None      # early exit threshold, pooled probe
    probe_stop_low_acc: float | None = None  # and the low-label probe
    probe_low_fraction: float = 0.01         # label budget of the low probe
    probe_pool_per_class: int = 20           # fit size of the pooled probe

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        return cls(**data)

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load_json(cls, path: str | Path) -> "TrainConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def pretrain_defaults(method: str) -> TrainConfig:
    """Full-scale defaults; batch 1024 contrastive, 896 for the EMA method."""
    if method not in ("simclr", "byol", "supcon"):
        raise ValueError(f"unknown pretraining method {method!r}")
    return TrainConfig(method=method, batch_size=896 if method == "byol" else 1024)


def desk_pretrain_config(method: str, seed: int = 0) -> TrainConfig:
    """Synthetic-corpus overlay: small inputs, short schedule, probe stop.

    The stop rule watches two diagnostics: a pooled linear probe (is the
    representation good at all) and a 1%-label probe (is it good in the
    low-label regime the sweep cares about); both must clear their bars.
    """
    base = pretrain_defaults(method)
    stop = {"simclr": 0.95, "byol": 0.93, "supcon": 0.97}[method]
    stop_low = {"simclr": 0.75, "byol": 0.70, "supcon": 0.80}[method]
    epochs = {"simclr": 60, "byol": 80, "supcon": 48}[method]
    cfg = replace(
        base,
        input_size=64,
        batch_size=256,
        epochs=epochs,
        seed=seed,
        probe_every=6,
        probe_stop_acc=stop,
        probe_stop_low_acc=stop_low,
    )
    if method == "byol":
        # a near-frozen target never catches up over a few hundred desk steps
        cfg = replace(cfg, tau_base=0.99)
    return cfg


@dataclass(frozen=True)
class LinearEvalConfig:
    learning_rate: float = 5e-2
    weight_decay: float = 0.0
    epochs: int = 90
    batch_size: int = 256
    seed: int = 0
    input_size: int = 224
    early_stop_patience: int = 15   # epochs without val-accuracy improvement
    augment: bool = True            # mild-profile augmentation on head inputs

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "LinearEvalConfig":
        return cls(**data)


def desk_linear_config(seed: int = 0) -> LinearEvalConfig:
    return LinearEvalConfig(epochs=40, input_size=64, seed=seed,
                            early_stop_patience=12)
