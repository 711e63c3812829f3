"""Exponential-moving-average target maintenance for self-distillation.

The target's decay factor ramps from tau_base at step 0 to 1.0 at the
final step on a cosine curve, so the target moves quickly early in
training and freezes at the end.  ``ema_update`` is the only mutator and
must be called by a single training coordinator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import torch

from radregion.errors import ShapeMismatch


def ema_schedule(tau_base: float, step: int, total_steps: int) -> float:
    """tau_t = 1 - (1 - tau_base) * (cos(pi * k / K) + 1) / 2."""
    if not 0 <= step <= total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps}]")
    return 1.0 - (1.0 - tau_base) * (math.cos(math.pi * step / total_steps) + 1.0) / 2.0


@dataclass
class EmaState:
    online: list[torch.Tensor]
    target: list[torch.Tensor]
    tau_base: float
    step: int
    total_steps: int

    def __post_init__(self):
        if len(self.online) != len(self.target):
            raise ShapeMismatch("online/target parameter counts differ")
        for o, t in zip(self.online, self.target):
            if o.shape != t.shape:
                raise ShapeMismatch(f"shape {tuple(o.shape)} != {tuple(t.shape)}")

    @property
    def tau(self) -> float:
        return ema_schedule(self.tau_base, self.step, self.total_steps)

    @classmethod
    def from_modules(cls, online: torch.nn.Module, target: torch.nn.Module,
                     tau_base: float, total_steps: int) -> "EmaState":
        return cls(
            online=[p for p in online.parameters()],
            target=[p for p in target.parameters()],
            tau_base=tau_base,
            step=0,
            total_steps=total_steps,
        )


def ema_update(state: EmaState) -> EmaState:
    """target <- tau_t * target + (1 - tau_t) * online, then advance the step.

    Target tensors are updated in place (they belong to the target
    network); online tensors are never touched.
    """
    tau = state.tau
    with torch.no_grad():
        for o, t in zip(state.online, state.target):
            t.mul_(tau).add_(o.detach(), alpha=1.0 - tau)
    return replace(state, step=state.step + 1)
