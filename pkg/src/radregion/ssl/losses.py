"""Pretraining objectives: contrastive (with and without label-extended
positives) and the normalized-prediction regression loss.

Conventions shared by the contrastive losses:
  * projections arrive as a 2N x P matrix of the two views per source;
  * similarity is cosine, so a common positive rescaling of all
    projections leaves the losses unchanged;
  * the softmax denominator for anchor i runs over every other view k != i,
    including the positives;
  * reduction is the mean over anchor views, keeping the scale independent
    of batch size.
"""

from __future__ import annotations

import torch

from radregion.errors import DegenerateProjection, NoPositivesAnywhere, ShapeMismatch

EPS = 1e-12


def default_pairing(n_sources: int, device=None) -> torch.Tensor:
    """Partner index for the [views_a; views_b] stacking convention."""
    idx = torch.arange(2 * n_sources, device=device)
    return torch.where(idx < n_sources, idx + n_sources, idx - n_sources)


def _check_pairing(pairing: torch.Tensor, n_views: int) -> None:
    if pairing.shape != (n_views,):
        raise ShapeMismatch(f"pairing must have shape ({n_views},)")
    idx = torch.arange(n_views, device=pairing.device)
    if bool((pairing == idx).any()):
        raise ShapeMismatch("pairing must be fixed-point free")
    if not bool((pairing[pairing] == idx).all()):
        raise ShapeMismatch("pairing must be an involution")


def _unit_rows(z: torch.Tensor) -> torch.Tensor:
    norms = z.norm(dim=-1, keepdim=True)
    if bool((norms < EPS).any()):
        raise DegenerateProjection("projection norm below 1e-12")
    return z / norms


def nt_xent(
    projections: torch.Tensor,
    temperature: float,
    pairing: torch.Tensor | None = None,
) -> torch.Tensor:
    """Temperature-scaled cross entropy over cosine similarities.

    For each view i with positive partner j, the loss is
    -log( exp(sim_ij / t) / sum_{k != i} exp(sim_ik / t) ), averaged over
    all 2N views.  With a single source (2N = 2) the denominator contains
    only the positive, so the loss is exactly zero.
    """
    if projections.ndim != 2 or projections.shape[0] % 2:
        raise ShapeMismatch("projections must be (2N, P)")
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    n_views = projections.shape[0]
    if pairing is None:
        pairing = default_pairing(n_views // 2, device=projections.device)
    _check_pairing(pairing, n_views)

    z = _unit_rows(projections)
    sim = (z @ z.T) / temperature
    eye = torch.eye(n_views, dtype=torch.bool, device=z.device)
    sim = sim.masked_fill(eye, float("-inf"))
    log_denom = torch.logsumexp(sim, dim=1)
    pos = sim[torch.arange(n_views, device=z.device), pairing]
    return (log_denom - pos).mean()


def supcon_loss(
    projections: torch.Tensor,
    labels: torch.Tensor,
    temperature: float,
) -> torch.Tensor:
    """Contrastive loss whose positives are all views sharing a class.

    `labels` holds one class per source (length N, the two views of source
    s are rows s and s+N) or one class per view (length 2N).  Anchors
    without positives are skipped; if no anchor has any positive the batch
    is degenerate and an error is raised.
    """
    if projections.ndim != 2:
        raise ShapeMismatch("projections must be (2N, P)")
    n_views = projections.shape[0]
    if labels.shape == (n_views // 2,) and n_views % 2 == 0:
        view_labels = torch.cat([labels, labels])
    elif labels.shape == (n_views,):
        view_labels = labels
    else:
        raise ShapeMismatch("labels must be per source (N,) or per view (2N,)")
    if temperature <= 0:
        raise ValueError("temperature must be positive")

    z = _unit_rows(projections)
    sim = (z @ z.T) / temperature
    eye = torch.eye(n_views, dtype=torch.bool, device=z.device)
    positive = view_labels.unsqueeze(0) == view_labels.unsqueeze(1)
    positive = positive & ~eye
    pos_counts = positive.sum(dim=1)
    if not bool((pos_counts > 0).any()):
        raise NoPositivesAnywhere("every view is the sole member of its class")

    sim = sim.masked_fill(eye, float("-inf"))
    log_prob = sim - torch.logsumexp(sim, dim=1, keepdim=True)
    # select before summing: the diagonal's -inf must never touch the sum
    contrib = torch.where(positive, log_prob, log_prob.new_zeros(()))
    anchor_has_pos = pos_counts > 0
    per_anchor = -contrib.sum(dim=1)[anchor_has_pos] \
        / pos_counts[anchor_has_pos].to(log_prob.dtype)
    return per_anchor.mean()


def byol_loss(prediction: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Squared distance between unit-normalized prediction and target.

    Equals 2 - 2 cos(prediction, target) per pair, averaged over the
    batch.  The target branch never receives gradients.
    """
    if prediction.shape != target.shape:
        raise ShapeMismatch("prediction and target must have identical shapes")
    q = _unit_rows(prediction)
    t = _unit_rows(target.detach())
    return ((q - t) ** 2).sum(dim=-1).mean()


def byol_symmetric_loss(
    prediction_a: torch.Tensor,
    target_b: torch.Tensor,
    prediction_b: torch.Tensor,
    target_a: torch.Tensor,
) -> torch.Tensor:
    """Average of the two view-swapped prediction losses."""
    return 0.5 * (byol_loss(prediction_a, target_b) + byol_loss(prediction_b, target_a))
