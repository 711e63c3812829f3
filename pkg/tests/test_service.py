import numpy as np
import pytest
from fastapi.testclient import TestClient

from radregion.audit.fixture import archive_audit_fixture
from radregion.audit.flags import flag_mismatches
from radregion.audit.predictions import PredictionSet
from radregion.audit.verdicts import apply_verdicts
from radregion.regions import NUM_REGIONS, AnatomicalRegion
from radregion.service.app import create_app


def small_predictions():
    archive = np.array([0, 1, 2, 3, 4, 5])
    predicted = np.array([0, 7, 2, 8, 4, 9])  # r1, r3, r5 flagged
    n = len(archive)
    probs = np.empty((n, NUM_REGIONS))
    conf = [0.9, 0.95, 0.9, 0.7, 0.9, 0.8]
    for i in range(n):
        probs[i] = (1 - conf[i]) / (NUM_REGIONS - 1)
        probs[i, predicted[i]] = conf[i]
    return PredictionSet(ids=tuple(f"r{i}" for i in range(n)), probs=probs,
                         archive_labels=archive, model_tag="svc")


@pytest.fixture()
def client(tmp_path):
    app = create_app(small_predictions(), ledger_path=tmp_path / "ledger.jsonl")
    return TestClient(app)


class TestQueue:
    def test_pending_queue_ordered_by_confidence(self, client):
        r = client.get("/candidates", params={"status": "pending"})
        assert r.status_code == 200
        body = r.json()
        assert body["total"] == 3
        assert [it["id"] for it in body["items"]] == ["r1", "r5", "r3"]
        first = body["items"][0]
        assert first["prediction"] == "hand"
        assert first["archive_label"] == "shoulder"
        assert len(first["softmax_top3"]) == 3

    def test_pagination_contract(self, client):
        body = client.get("/candidates", params={"page": 1}).json()
        assert body["page_size"] == 50
        assert body["items"] == []  # only 3 candidates

    def test_image_endpoint_png(self, client):
        r = client.get("/candidates/r1/image")
        assert r.status_code == 200
        assert r.headers["content-type"] == "image/png"
        assert r.content[:8] == b"\x89PNG\r\n\x1a\n"

    def test_image_unknown_candidate(self, client):
        assert client.get("/candidates/zz/image").status_code == 404


class TestVerdictPosting:
    def test_valid_relabel_updates_metrics(self, client):
        before = client.get("/metrics").json()
        assert before["pending"] == 3
        r = client.post("/candidates/r1/verdict",
                        json={"decision": "relabel", "relabel_to": "hand",
                              "reviewer": "me"})
        assert r.status_code == 200
        after = client.get("/metrics").json()
        assert after["pending"] == 2
        assert after["corrected_accuracy"] > before["corrected_accuracy"]

    def test_out_of_domain_shrinks_denominator(self, client):
        client.post("/candidates/r3/verdict", json={"decision": "out_of_domain"})
        m = client.get("/metrics").json()
        assert m["n_excluded"] == 1
        assert m["n_kept"] == 5

    def test_relabel_to_archive_label_422(self, client):
        r = client.post("/candidates/r1/verdict",
                        json={"decision": "relabel", "relabel_to": "shoulder"})
        assert r.status_code == 422

    def test_unknown_candidate_404(self, client):
        r = client.post("/candidates/zz/verdict", json={"decision": "unusable"})
        assert r.status_code == 404

    def test_unflagged_record_409(self, client):
        r = client.post("/candidates/r0/verdict", json={"decision": "unusable"})
        assert r.status_code == 409

    def test_malformed_decision_422(self, client):
        r = client.post("/candidates/r1/verdict", json={"decision": "dunno"})
        assert r.status_code == 422

    def test_supersede_latest_wins(self, client):
        client.post("/candidates/r1/verdict", json={"decision": "out_of_domain"})
        client.post("/candidates/r1/verdict",
                    json={"decision": "relabel", "relabel_to": 7})
        body = client.get("/candidates", params={"status": "decided"}).json()
        item = next(it for it in body["items"] if it["id"] == "r1")
        assert item["verdict"]["decision"] == "relabel"

    def test_metrics_consistent_with_offline_recompute(self, client, tmp_path):
        client.post("/candidates/r1/verdict",
                    json={"decision": "relabel", "relabel_to": "hand"})
        client.post("/candidates/r5/verdict", json={"decision": "unusable"})
        m = client.get("/metrics").json()
        from radregion.audit.verdicts import VerdictLedger

        ledger = VerdictLedger(tmp_path / "ledger.jsonl")
        offline = apply_verdicts(small_predictions(), ledger.active())
        assert m["corrected_accuracy"] == pytest.approx(offline.corrected_accuracy)
        assert m["original_accuracy"] == pytest.approx(offline.original_accuracy)


class TestFixtureSession:
    def test_posting_all_fixture_verdicts_reaches_98(self, tmp_path):
        pred, verdicts = archive_audit_fixture()
        app = create_app(pred, ledger_path=tmp_path / "ledger.jsonl")
        client = TestClient(app)
        m0 = client.get("/metrics").json()
        assert f"{m0['original_accuracy']:.1%}" == "96.6%"
        assert m0["pending"] == 328
        for v in verdicts:
            payload = {"decision": v.decision, "reviewer": "fixture"}
            if v.relabel_to is not None:
                payload["relabel_to"] = int(v.relabel_to)
            r = client.post(f"/candidates/{v.candidate_id}/verdict", json=payload)
            assert r.status_code == 200
        m = client.get("/metrics").json()
        assert f"{m['corrected_accuracy']:.1%}" == "98.0%"
        assert m["corrected_accuracy"] == pytest.approx(9516 / 9708)
        assert m["decided"] == 154
        assert m["pending"] == 328 - 154

    def test_duplicate_posts_idempotent(self, tmp_path):
        pred, verdicts = archive_audit_fixture()
        app = create_app(pred, ledger_path=tmp_path / "ledger.jsonl")
        client = TestClient(app)
        v = verdicts[0]
        payload = {"decision": v.decision, "reviewer": "fixture"}
        if v.relabel_to is not None:
            payload["relabel_to"] = int(v.relabel_to)
        client.post(f"/candidates/{v.candidate_id}/verdict", json=payload)
        m1 = client.get("/metrics").json()
        client.post(f"/candidates/{v.candidate_id}/verdict", json=payload)
        m2 = client.get("/metrics").json()
        assert m1["corrected_accuracy"] == m2["corrected_accuracy"]
        assert m1["decided"] == m2["decided"] == 1
