"""Self-supervised anatomical-region classification for skeletal radiographs.

Subpackages:
    data       dataset index, manifests, splits, synthetic corpus, label noise
    imaging    image cleaning and the stochastic augmentation pipeline
    ssl        contrastive / self-distillation losses, heads, EMA target
    training   encoder, pretraining loops, linear evaluation, label sweeps
    audit      metrics, ensembling, mismatch flagging, verdict bookkeeping
    explain    guided Grad-CAM attribution and embedding export
    service    HTTP review service for the audit queue
"""

__version__ = "0.1.0"

from radregion.regions import AnatomicalRegion

__all__ = ["AnatomicalRegion", "__version__"]
