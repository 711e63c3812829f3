import csv

import pytest

from radregion.errors import EmptySplit
from radregion.explain.embeddings import export_embeddings
from radregion.training.encoder import EncoderCheckpoint, build_encoder


@pytest.fixture(scope="module")
def checkpoint():
    return EncoderCheckpoint(model=build_encoder(3), method="simclr", epochs=1)


class TestExportEmbeddings:
    def test_shape_and_count(self, checkpoint, small_corpus, small_store, tmp_path):
        index, _, _ = small_corpus
        records = list(index.split_records("test"))[:10]
        path = tmp_path / "emb.csv"
        n = export_embeddings(checkpoint, small_store, records, path, 64)
        assert n == 10
        with path.open() as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 11  # header + 10
        assert len(rows[0]) == 2 + 512
        assert rows[0][:2] == ["id", "label"]

    def test_two_exports_identical(self, checkpoint, small_corpus, small_store, tmp_path):
        index, _, _ = small_corpus
        records = list(index.split_records("val"))[:6]
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        export_embeddings(checkpoint, small_store, records, a, 64)
        export_embeddings(checkpoint, small_store, records, b, 64)
        assert a.read_bytes() == b.read_bytes()

    def test_duplicate_images_identical_vectors(self, checkpoint, small_corpus,
                                                small_store, tmp_path):
        index, _, _ = small_corpus
        rec = list(index.split_records("test"))[0]
        path = tmp_path / "dup.csv"
        export_embeddings(checkpoint, small_store, [rec, rec], path, 64)
        with path.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[1][2:] == rows[2][2:]

    def test_empty_split_rejected(self, checkpoint, small_store, tmp_path):
        with pytest.raises(EmptySplit):
            export_embeddings(checkpoint, small_store, [], tmp_path / "x.csv", 64)
