import numpy as np
import pytest

from radregion.audit.ensemble import ensemble_predict
from radregion.audit.predictions import PredictionSet
from radregion.errors import IdMismatch
from radregion.regions import NUM_REGIONS


def random_predset(rng, ids, tag):
    logits = rng.normal(size=(len(ids), NUM_REGIONS)) * 3
    archive = rng.integers(0, NUM_REGIONS, len(ids))
    return PredictionSet.from_logits(ids=ids, logits=logits,
                                     archive_labels=archive, model_tag=tag)


def naive_ensemble(members):
    """Independent re-implementation: plain dict-based softmax-sum argmax."""
    ids = members[0].ids
    out = {}
    for rid in ids:
        total = np.zeros(NUM_REGIONS)
        for m in members:
            i = m.ids.index(rid)
            total += m.probs[i]
        out[rid] = int(np.argmax(total))
    return out


class TestEnsemble:
    def test_two_class_toy(self):
        # members (0.6, 0.4) and (0.3, 0.7) -> sums (0.9, 1.1) -> class 2
        p1 = np.full((1, NUM_REGIONS), 0.0)
        p1[0, 0], p1[0, 1] = 0.6, 0.4
        p2 = np.full((1, NUM_REGIONS), 0.0)
        p2[0, 0], p2[0, 1] = 0.3, 0.7
        a = PredictionSet(ids=("x",), probs=p1, archive_labels=np.array([0]))
        b = PredictionSet(ids=("x",), probs=p2, archive_labels=np.array([0]))
        combined = ensemble_predict([a, b])
        assert int(combined.predicted[0]) == 1

    def test_idempotent_on_identical_members(self, rng):
        ids = tuple(f"r{i}" for i in range(20))
        m = random_predset(rng, ids, "a")
        combined = ensemble_predict([m, m, m])
        assert np.array_equal(combined.predicted, m.predicted)
        assert np.allclose(combined.probs, m.probs, atol=1e-12)

    def test_matches_naive_reimplementation(self):
        rng = np.random.default_rng(7)
        for trial in range(50):
            ids = tuple(f"r{i}" for i in range(int(rng.integers(2, 30))))
            members = [random_predset(rng, ids, f"m{k}")
                       for k in range(int(rng.integers(2, 5)))]
            for m in members[1:]:
                object.__setattr__(m, "archive_labels",
                                   members[0].archive_labels.copy())
            combined = ensemble_predict(members)
            want = naive_ensemble(members)
            got = {rid: int(p) for rid, p in zip(combined.ids, combined.predicted)}
            assert got == want

    def test_member_order_invariance(self, rng):
        ids = tuple(f"r{i}" for i in range(15))
        a = random_predset(rng, ids, "a")
        b = random_predset(rng, ids, "b")
        object.__setattr__(b, "archive_labels", a.archive_labels.copy())
        fwd = ensemble_predict([a, b])
        rev = ensemble_predict([b, a])
        assert np.array_equal(fwd.predicted, rev.predicted)

    def test_alignment_by_id(self, rng):
        ids = tuple(f"r{i}" for i in range(10))
        a = random_predset(rng, ids, "a")
        perm = np.random.default_rng(0).permutation(10)
        b = PredictionSet(ids=tuple(a.ids[i] for i in perm),
                          probs=a.probs[perm],
                          archive_labels=a.archive_labels[perm], model_tag="b")
        combined = ensemble_predict([a, b])
        assert np.array_equal(combined.predicted, a.predicted)

    def test_id_mismatch(self, rng):
        a = random_predset(rng, ("x", "y"), "a")
        b = random_predset(rng, ("x", "z"), "b")
        with pytest.raises(IdMismatch):
            ensemble_predict([a, b])
