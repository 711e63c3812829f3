from radregion.data.index import DatasetIndex, RadiographRecord, Split
from radregion.data.manifest import load_manifest, save_manifest
from radregion.data.noise import inject_label_noise
from radregion.data.splits import split_dataset
from radregion.data.synthetic import SyntheticConfig, generate_synthetic, object_bbox

__all__ = [
    "DatasetIndex",
    "RadiographRecord",
    "Split",
    "load_manifest",
    "save_manifest",
    "split_dataset",
    "inject_label_noise",
    "SyntheticConfig",
    "generate_synthetic",
    "object_bbox",
]
