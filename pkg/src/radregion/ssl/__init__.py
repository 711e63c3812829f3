from radregion.ssl.ema import EmaState, ema_schedule, ema_update
from radregion.ssl.heads import PredictionHead, ProjectionHead
from radregion.ssl.losses import byol_loss, byol_symmetric_loss, default_pairing, nt_xent, supcon_loss

__all__ = [
    "EmaState",
    "ema_schedule",
    "ema_update",
    "ProjectionHead",
    "PredictionHead",
    "nt_xent",
    "supcon_loss",
    "byol_loss",
    "byol_symmetric_loss",
    "default_pairing",
]
