"""HTTP audit service: candidate queue, images, verdict intake, live metrics.

One process, file-backed state: a prediction set, the flagged-candidate
queue, and an append-only verdict ledger.  Verdict writes are serialized
through a single lock; reads work off immutable snapshots refreshed after
each write.  All responses are JSON except the PNG image endpoint.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

import cv2
import numpy as np
from fastapi import FastAPI, HTTPException, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from radregion.audit.flags import AuditCandidate, flag_mismatches
from radregion.audit.predictions import PredictionSet
from radregion.audit.verdicts import Verdict, VerdictLedger, apply_verdicts, record_verdict
from radregion.errors import InvalidVerdict
from radregion.regions import NUM_REGIONS, AnatomicalRegion

PAGE_SIZE = 50


class VerdictBody(BaseModel):
    decision: str
    relabel_to: Optional[str | int] = None
    reviewer: str = ""


def _region_code(value: str | int) -> int:
    if isinstance(value, int) or (isinstance(value, str) and value.isdigit()):
        code = int(value)
        if not 0 <= code < NUM_REGIONS:
            raise InvalidVerdict(f"region code {code} out of range")
        return code
    return int(AnatomicalRegion.from_name(str(value)))


class AuditService:
    def __init__(
        self,
        predictions: PredictionSet,
        ledger_path: str | Path | None = None,
        image_refs: dict[str, str] | None = None,
    ):
        self.predictions = predictions
        self.candidates: list[AuditCandidate] = flag_mismatches(predictions, image_refs)
        self.by_id = {c.record_id: c for c in self.candidates}
        self.record_ids = set(predictions.ids)
        self.ledger = VerdictLedger(ledger_path)
        self._lock = threading.Lock()
        self._metrics_cache: dict | None = None

    # --- queue -----------------------------------------------------------

    def queue_page(self, status: str | None, page: int) -> dict:
        active = self.ledger.active()
        items = []
        for position, c in enumerate(self.candidates):
            decided = c.record_id in active
            if status == "pending" and decided:
                continue
            if status == "decided" and not decided:
                continue
            entry = {
                "id": c.record_id,
                "queue_position": position,
                "archive_label": AnatomicalRegion(c.archive_label).name,
                "prediction": AnatomicalRegion(c.predicted).name,
                "confidence": c.confidence,
                "softmax_top3": [
                    {"region": name, "p": p} for name, p in c.top3()
                ],
                "status": "decided" if decided else "pending",
            }
            if decided:
                v = active[c.record_id]
                entry["verdict"] = {
                    "decision": v.decision,
                    "relabel_to": (AnatomicalRegion(v.relabel_to).name
                                   if v.relabel_to is not None else None),
                    "reviewer": v.reviewer,
                }
            items.append(entry)
        start = page * PAGE_SIZE
        return {
            "items": items[start : start + PAGE_SIZE],
            "page": page,
            "page_size": PAGE_SIZE,
            "total": len(items),
            "pending_total": sum(
                1 for c in self.candidates if c.record_id not in active
            ),
        }

    # --- images ----------------------------------------------------------

    def image_png(self, record_id: str) -> bytes:
        c = self.by_id.get(record_id)
        if c is None:
            raise KeyError(record_id)
        if c.image_ref and Path(c.image_ref).is_file():
            return Path(c.image_ref).read_bytes()
        return _placeholder_png(record_id)

    # --- verdicts / metrics ------------------------------------------------

    def post_verdict(self, record_id: str, body: VerdictBody) -> dict:
        if record_id not in self.by_id:
            if record_id in self.record_ids:
                raise HTTPException(
                    status_code=409,
                    detail="record is not flagged; prediction matches the archive label",
                )
            raise HTTPException(status_code=404, detail="unknown candidate")

        relabel_to = None
        try:
            if body.relabel_to is not None:
                relabel_to = _region_code(body.relabel_to)
            verdict = Verdict.now(
                candidate_id=record_id,
                decision=body.decision,
                relabel_to=relabel_to,
                reviewer=body.reviewer,
            )
            with self._lock:
                record_verdict(
                    self.ledger, verdict,
                    candidates={c.record_id: c.archive_label for c in self.candidates},
                )
                self._metrics_cache = None
        except InvalidVerdict as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except Exception as exc:  # unknown label names and similar
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return {
            "ok": True,
            "candidate": record_id,
            "active_verdict": {
                "decision": verdict.decision,
                "relabel_to": relabel_to,
                "reviewer": verdict.reviewer,
                "timestamp": verdict.timestamp,
            },
        }

    def metrics(self) -> dict:
        with self._lock:
            if self._metrics_cache is not None:
                return self._metrics_cache
            active = self.ledger.active()
            corrected = apply_verdicts(self.predictions, active)
            per_class = []
            for r in AnatomicalRegion:
                orig = corrected.per_region_original[int(r)]
                corr = corrected.per_region_corrected[int(r)]
                per_class.append({
                    "region": r.name,
                    "original": None if np.isnan(orig) else float(orig),
                    "corrected": None if np.isnan(corr) else float(corr),
                    "delta": (None if np.isnan(orig) or np.isnan(corr)
                              else float(corr - orig)),
                })
            self._metrics_cache = {
                "original_accuracy": corrected.original_accuracy,
                "corrected_accuracy": corrected.corrected_accuracy,
                "n_total": corrected.n_total,
                "n_kept": corrected.n_kept,
                "n_excluded": corrected.n_excluded,
                "n_relabeled": corrected.n_relabeled,
                "pending": sum(
                    1 for c in self.candidates if c.record_id not in active
                ),
                "decided": len(active),
                "per_class": per_class,
            }
            return self._metrics_cache


def _placeholder_png(record_id: str) -> bytes:
    import zlib

    # fixture candidates have no stored radiograph; serve a deterministic stand-in
    rng = np.random.default_rng(zlib.crc32(record_id.encode()))
    img = (rng.uniform(40, 70, size=(224, 224))).astype(np.uint8)
    cv2.circle(img, (112, 112), 60, int(rng.integers(150, 220)), 3)
    ok, buf = cv2.imencode(".png", img)
    return buf.tobytes()


def create_app(
    predictions: PredictionSet,
    ledger_path: str | Path | None = None,
    image_refs: dict[str, str] | None = None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="radregion audit service")
    service = AuditService(predictions, ledger_path, image_refs)
    app.state.service = service

    @app.get("/candidates")
    def get_candidates(status: Optional[str] = None, page: int = 0):
        if status not in (None, "pending", "decided"):
            raise HTTPException(status_code=422, detail="status must be pending|decided")
        return service.queue_page(status, max(page, 0))

    @app.get("/candidates/{record_id}/image")
    def get_image(record_id: str):
        try:
            data = service.image_png(record_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown candidate")
        return Response(content=data, media_type="image/png")

    @app.post("/candidates/{record_id}/verdict")
    def post_verdict(record_id: str, body: VerdictBody):
        return service.post_verdict(record_id, body)

    @app.get("/metrics")
    def get_metrics():
        return service.metrics()

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True),
                  name="ui")
    return app
