from radregion.imaging.augment import AugmentParams, augment, make_view_pair, sample_augment_params
from radregion.imaging.cleaning import clean, normalize_rotation, remove_border
from radregion.imaging.gauges import GaugeTemplate, default_templates, insert_gauges
from radregion.imaging.io import load_image, save_image
from radregion.imaging.profiles import PRETRAIN, TRAIN, AugmentationProfile

__all__ = [
    "AugmentationProfile",
    "PRETRAIN",
    "TRAIN",
    "AugmentParams",
    "GaugeTemplate",
    "augment",
    "clean",
    "default_templates",
    "insert_gauges",
    "load_image",
    "make_view_pair",
    "normalize_rotation",
    "remove_border",
    "sample_augment_params",
    "save_image",
]
