from radregion.training.config import LinearEvalConfig, TrainConfig, cosine_lr, desk_pretrain_config, pretrain_defaults
from radregion.training.encoder import Encoder, EncoderCheckpoint, encode
from radregion.training.linear import LinearHead, predict_records, train_linear_head
from radregion.training.loader import ImageStore
from radregion.training.pretrain import pretrain
from radregion.training.baseline import train_supervised_baseline
from radregion.training.subsample import subsample_labels
from radregion.training.sweep import low_data_sweep

__all__ = [
    "TrainConfig",
    "LinearEvalConfig",
    "cosine_lr",
    "pretrain_defaults",
    "desk_pretrain_config",
    "Encoder",
    "EncoderCheckpoint",
    "encode",
    "ImageStore",
    "pretrain",
    "LinearHead",
    "train_linear_head",
    "predict_records",
    "train_supervised_baseline",
    "subsample_labels",
    "low_data_sweep",
]
