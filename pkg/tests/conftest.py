import numpy as np
import pytest

from radregion.data import SyntheticConfig, generate_synthetic, split_dataset


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """140 images (10 per class), 64 px, mixed borders; split 50/25/25."""
    out = tmp_path_factory.mktemp("corpus")
    cfg = SyntheticConfig(images_per_class=10, image_size=64, seed=11,
                          border_probability=0.5)
    index = generate_synthetic(cfg, out)
    index = split_dataset(index, (0.5, 0.25, 0.25), seed=1)
    return index, out, cfg


@pytest.fixture(scope="session")
def small_store(small_corpus):
    from radregion.training.loader import ImageStore

    index, _, _ = small_corpus
    return ImageStore(index)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
