"""Command-line orchestration of the full pipeline.

Every subcommand is a thin wrapper over one library operation; outputs are
identical to calling the operation directly.  Exit codes: 0 ok, 1 user
error, 2 internal error.  Failures print a machine-readable JSON object to
stderr.  Environment variables are honored only for the service port
(RADREGION_PORT) and the data root (RADREGION_DATA_ROOT).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np
import torch

from radregion.audit.ensemble import ensemble_predict
from radregion.audit.fixture import archive_audit_fixture
from radregion.audit.flags import flag_mismatches, load_candidates, save_candidates
from radregion.audit.metrics import accuracy_report, render_confusion_png
from radregion.audit.predictions import PredictionSet
from radregion.audit.verdicts import Verdict, VerdictLedger, apply_verdicts
from radregion.data.index import DatasetIndex
from radregion.data.manifest import load_manifest, save_manifest
from radregion.data.noise import inject_label_noise
from radregion.data.splits import split_dataset
from radregion.data.synthetic import SyntheticConfig, generate_synthetic
from radregion.errors import RadRegionError
from radregion.explain.embeddings import export_embeddings
from radregion.explain.gradcam import ClassifierModel, guided_gradcam, save_triptych
from radregion.imaging.cleaning import clean
from radregion.imaging.io import load_image, save_image
from radregion.imaging.profiles import PRETRAIN, TRAIN, AugmentationProfile
from radregion.regions import AnatomicalRegion
from radregion.runmeta import RunManifest
from radregion.training.baseline import train_supervised_baseline
from radregion.training.config import (
    LinearEvalConfig,
    TrainConfig,
    desk_linear_config,
    desk_pretrain_config,
    pretrain_defaults,
)
from radregion.training.encoder import EncoderCheckpoint
from radregion.training.linear import LinearHead, predict_records, train_linear_head
from radregion.training.loader import ImageStore
from radregion.training.pretrain import pretrain
from radregion.training.subsample import subsample_labels
from radregion.training.sweep import low_data_sweep


def _data_root() -> Path:
    return Path(os.environ.get("RADREGION_DATA_ROOT", "."))


def _resolve(path: str) -> Path:
    p = Path(path)
    return p if p.is_absolute() else _data_root() / p


def _apply_overrides(cfg, args, fields=("epochs", "batch_size", "seed")):
    updates = {}
    if getattr(args, "config", None):
        updates.update(json.loads(Path(args.config).read_text()))
    for name in fields:
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "lr", None) is not None:
        updates["learning_rate"] = args.lr
    if getattr(args, "input_size", None) is not None:
        updates["input_size"] = args.input_size
    valid = {f.name for f in dataclasses.fields(cfg)}
    updates = {k: v for k, v in updates.items() if k in valid}
    return dataclasses.replace(cfg, **updates)


def _load_profile(args, default: AugmentationProfile) -> AugmentationProfile:
    if getattr(args, "profile", None):
        return AugmentationProfile.load_json(args.profile)
    return default


def _load_head(path: str | Path) -> LinearHead:
    head = LinearHead()
    head.load_state_dict(torch.load(path, map_location="cpu", weights_only=True))
    head.eval()
    return head


def _split_records(index: DatasetIndex, split: str):
    return list(index.split_records(split))


# --- subcommands -----------------------------------------------------------

def cmd_synth(args) -> int:
    cfg = SyntheticConfig(
        images_per_class=args.per_class,
        image_size=args.size,
        seed=args.seed,
        background_noise_level=args.noise,
        border_probability=args.border_prob,
    )
    out = _resolve(args.out)
    index = generate_synthetic(cfg, out)
    if args.split:
        ratios = tuple(float(x) for x in args.split.split(","))
        index = split_dataset(index, ratios, seed=args.seed)
        save_manifest(index, out / "manifest.csv")
    meta = RunManifest(command="synth", config=dataclasses.asdict(cfg))
    meta.add_artifact("manifest", out / "manifest.csv")
    meta.add_artifact("boxes", out / "boxes.json")
    meta.write(out / "run.json")
    print(json.dumps({"records": len(index), "out": str(out)}))
    return 0


def cmd_split(args) -> int:
    index = load_manifest(_resolve(args.manifest))
    ratios = tuple(float(x) for x in args.ratios.split(","))
    index = split_dataset(index, ratios, seed=args.seed,
                          allow_reassign=args.allow_reassign)
    save_manifest(index, _resolve(args.out))
    print(json.dumps({"records": len(index), "out": args.out}))
    return 0


def cmd_clean(args) -> int:
    index = load_manifest(_resolve(args.manifest))
    out = _resolve(args.out)
    (out / "images").mkdir(parents=True, exist_ok=True)
    new_records = []
    for rec in index:
        cleaned = clean(load_image(rec.image_ref))
        dest = out / "images" / f"{rec.id}.png"
        save_image(cleaned, dest)
        new_records.append(dataclasses.replace(rec, image_ref=str(dest)))
    cleaned_index = index.with_records(new_records)
    save_manifest(cleaned_index, out / "manifest.csv")
    print(json.dumps({"cleaned": len(cleaned_index), "out": str(out)}))
    return 0


def cmd_noise(args) -> int:
    index = load_manifest(_resolve(args.manifest))
    noised = inject_label_noise(index, rate=args.rate, seed=args.seed)
    noised.save_jsonl(_resolve(args.out))
    n_bad = sum(1 for r in noised if r.corrupted)
    print(json.dumps({"records": len(noised), "corrupted": n_bad, "out": args.out}))
    return 0


def cmd_pretrain(args) -> int:
    index = load_manifest(_resolve(args.manifest))
    cfg = desk_pretrain_config(args.method) if args.desk else pretrain_defaults(args.method)
    cfg = _apply_overrides(cfg, args)
    store = ImageStore(index)
    out_dir = _resolve(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = pretrain(args.method, index, store, cfg,
                      profile=_load_profile(args, PRETRAIN),
                      checkpoint_dir=out_dir)
    curve_path = out_dir / f"{args.method}_loss.csv"
    with curve_path.open("w") as fh:
        fh.write("epoch,loss\n")
        for epoch, loss in result.loss_curve:
            fh.write(f"{epoch},{loss:.6f}\n")
    meta = RunManifest(command="pretrain", config=cfg.to_dict())
    meta.add_artifact("checkpoint", out_dir / f"{args.method}_final.pt")
    meta.add_artifact("loss_curve", curve_path)
    meta.write(out_dir / f"{args.method}_run.json")
    print(json.dumps({
        "method": args.method,
        "epochs": result.checkpoint.epochs,
        "final_loss": result.loss_curve[-1][1] if result.loss_curve else None,
        "checkpoint": str(out_dir / f"{args.method}_final.pt"),
    }))
    return 0


def cmd_linear_eval(args) -> int:
    index = load_manifest(_resolve(args.manifest))
    ckpt = EncoderCheckpoint.load(_resolve(args.checkpoint))
    cfg = desk_linear_config() if args.desk else LinearEvalConfig()
    cfg = _apply_overrides(cfg, args)
    store = ImageStore(index)
    subset = subsample_labels(index, args.fraction, cfg.seed)
    result = train_linear_head(ckpt, store, subset, cfg,
                               val_records=_split_records(index, "val"),
                               profile=_load_profile(args, TRAIN))
    out_dir = _resolve(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    head_path = out_dir / f"{ckpt.method}_head.pt"
    torch.save(result.head.state_dict(), head_path)
    preds = predict_records(ckpt, result.head, store,
                            _split_records(index, "test"), cfg.input_size)
    pred_path = out_dir / f"{ckpt.method}_test_predictions.csv"
    preds.save_csv(pred_path)
    report = accuracy_report(preds)
    report_path = out_dir / f"{ckpt.method}_report.json"
    report_path.write_text(json.dumps(report.as_dict(), indent=2) + "\n")
    meta = RunManifest(command="linear-eval", config=cfg.to_dict())
    for name, p in [("head", head_path), ("predictions", pred_path),
                    ("report", report_path)]:
        meta.add_artifact(name, p)
    meta.write(out_dir / f"{ckpt.method}_linear_run.json")
    print(json.dumps({"labeled": len(subset), "test_accuracy": report.overall}))
    return 0


def cmd_baseline(args) -> int:
    index = load_manifest(_resolve(args.manifest))
    cfg = TrainConfig(method="supervised", batch_size=256,
                      input_size=64 if args.desk else 224,
                      epochs=60 if args.desk else 200)
    cfg = _apply_overrides(cfg, args)
    store = ImageStore(index)
    subset = subsample_labels(index, args.fraction, cfg.seed)
    result = train_supervised_baseline(subset, store, cfg,
                                       val_records=_split_records(index, "val"))
    preds = predict_records(result.checkpoint, result.head, store,
                            _split_records(index, "test"), cfg.input_size,
                            model_tag="supervised")
    out_dir = _resolve(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result.checkpoint.save(out_dir / "supervised_final.pt")
    torch.save(result.head.state_dict(), out_dir / "supervised_head.pt")
    pred_path = out_dir / "supervised_test_predictions.csv"
    preds.save_csv(pred_path)
    report = accuracy_report(preds)
    print(json.dumps({"labeled": len(subset), "test_accuracy": report.overall}))
    return 0


def cmd_sweep(args) -> int:
    index = load_manifest(_resolve(args.manifest))
    store = ImageStore(index)
    checkpoints = {}
    for path in args.checkpoints:
        ckpt = EncoderCheckpoint.load(_resolve(path))
        checkpoints[ckpt.method] = ckpt
    cfg = desk_linear_config() if args.desk else LinearEvalConfig()
    cfg = _apply_overrides(cfg, args, fields=("batch_size",))
    fractions = [float(x) for x in args.fractions.split(",")]
    seeds = [int(x) for x in args.seeds.split(",")]
    out_dir = _resolve(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = low_data_sweep(checkpoints, index, store, fractions, seeds, cfg,
                          out_csv=out_dir / "sweep.csv",
                          out_plot=out_dir / "sweep.png")
    print(json.dumps({"rows": len(rows), "csv": str(out_dir / "sweep.csv")}))
    return 0


def cmd_evaluate(args) -> int:
    if args.predictions:
        preds = PredictionSet.load_csv(_resolve(args.predictions))
    else:
        index = load_manifest(_resolve(args.manifest))
        store = ImageStore(index)
        ckpt = EncoderCheckpoint.load(_resolve(args.checkpoint))
        head = _load_head(_resolve(args.head))
        preds = predict_records(ckpt, head, store,
                                _split_records(index, args.split),
                                args.input_size or 64)
        if args.out:
            preds.save_csv(_resolve(args.out))
    report = accuracy_report(preds)
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def cmd_ensemble(args) -> int:
    members = [PredictionSet.load_csv(_resolve(p)) for p in args.members]
    combined = ensemble_predict(members)
    combined.save_csv(_resolve(args.out))
    report = accuracy_report(combined)
    print(json.dumps({"members": len(members), "accuracy": report.overall,
                      "out": args.out}))
    return 0


def cmd_embed(args) -> int:
    index = load_manifest(_resolve(args.manifest))
    store = ImageStore(index)
    ckpt = EncoderCheckpoint.load(_resolve(args.checkpoint))
    n = export_embeddings(ckpt, store, _split_records(index, args.split),
                          _resolve(args.out), args.input_size or 64)
    print(json.dumps({"rows": n, "out": args.out}))
    return 0


def cmd_gradcam(args) -> int:
    index = load_manifest(_resolve(args.manifest))
    store = ImageStore(index)
    ckpt = EncoderCheckpoint.load(_resolve(args.checkpoint))
    model = ClassifierModel(ckpt, _load_head(_resolve(args.head)))
    records = _split_records(index, args.split)
    if args.ids:
        wanted = set(args.ids.split(","))
        records = [r for r in records if r.id in wanted]
    records = records[: args.limit]
    out_dir = _resolve(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for rec in records:
        img = store[rec.id]
        attribution = guided_gradcam(model, img, int(rec.archive_label),
                                     record_id=rec.id)
        save_triptych(img, attribution, out_dir / f"{rec.id}_gradcam.png")
    print(json.dumps({"images": len(records), "out": str(out_dir)}))
    return 0


def _load_audit_inputs(args) -> tuple[PredictionSet, list[Verdict] | None]:
    if getattr(args, "fixture", None):
        if args.fixture != "archive":
            raise RadRegionError(f"unknown fixture {args.fixture!r}")
        return archive_audit_fixture()
    preds = PredictionSet.load_csv(_resolve(args.predictions))
    return preds, None


def cmd_audit_flag(args) -> int:
    preds, _ = _load_audit_inputs(args)
    image_refs = {}
    if args.manifest:
        index = load_manifest(_resolve(args.manifest))
        image_refs = {r.id: r.image_ref for r in index}
    candidates = flag_mismatches(preds, image_refs)
    save_candidates(candidates, _resolve(args.out))
    print(json.dumps({"candidates": len(candidates), "out": args.out}))
    return 0


def cmd_audit_apply(args) -> int:
    preds, fixture_verdicts = _load_audit_inputs(args)
    if fixture_verdicts is not None:
        verdicts: list[Verdict] = fixture_verdicts
    else:
        verdicts = list(VerdictLedger(_resolve(args.ledger)).active().values())
    corrected = apply_verdicts(preds, verdicts)
    summary = corrected.summary()
    if args.out_dir:
        out_dir = _resolve(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "corrected_report.json").write_text(
            json.dumps(summary, indent=2) + "\n")
        render_confusion_png(corrected.cm_old, out_dir / "cm_original.png",
                             "original labels")
        render_confusion_png(corrected.cm_new, out_dir / "cm_corrected.png",
                             "corrected labels")
        render_confusion_png(corrected.delta, out_dir / "cm_delta.png",
                             "corrected - original")
    print(json.dumps(summary, indent=2))
    print(f"accuracy: {corrected.original_accuracy:.1%} -> "
          f"{corrected.corrected_accuracy:.1%}")
    return 0


def cmd_audit_serve(args) -> int:
    import uvicorn

    from radregion.service.app import create_app

    preds, fixture_verdicts = _load_audit_inputs(args)
    image_refs = {}
    if args.manifest:
        index = load_manifest(_resolve(args.manifest))
        image_refs = {r.id: r.image_ref for r in index}
    elif args.candidates:
        image_refs = {c.record_id: c.image_ref
                      for c in load_candidates(_resolve(args.candidates))
                      if c.image_ref}
    app = create_app(preds, ledger_path=_resolve(args.ledger),
                     image_refs=image_refs, frontend_dir=args.frontend)
    port = int(os.environ.get("RADREGION_PORT", args.port))
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radregion",
        description="self-supervised anatomical-region classification toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--per-class", type=int, default=200)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.08)
    p.add_argument("--border-prob", type=float, default=0.3)
    p.add_argument("--split", default="", help="train,val,test ratios, e.g. 0.64,0.16,0.20")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("split", help="stratified split of a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ratios", default="0.64,0.16,0.20")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allow-reassign", action="store_true")
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("clean", help="batch border removal + rotation normalization")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_clean)

    p = sub.add_parser("noise", help="inject synthetic label noise")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_noise)

    def _train_flags(p):
        p.add_argument("--config", help="JSON file overriding config fields")
        p.add_argument("--epochs", type=int)
        p.add_argument("--batch-size", dest="batch_size", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--lr", type=float)
        p.add_argument("--input-size", dest="input_size", type=int)
        p.add_argument("--desk", action="store_true",
                       help="desk-scale preset (64 px, small batch, short schedule)")
        p.add_argument("--profile", help="augmentation profile JSON")

    p = sub.add_parser("pretrain", help="self-supervised pretraining")
    p.add_argument("--method", choices=["simclr", "byol", "supcon"], required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    _train_flags(p)
    p.set_defaults(fn=cmd_pretrain)

    p = sub.add_parser("linear-eval", help="frozen-backbone linear evaluation")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--fraction", type=float, default=1.0)
    _train_flags(p)
    p.set_defaults(fn=cmd_linear_eval)

    p = sub.add_parser("baseline", help="fully supervised comparison run")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--fraction", type=float, default=1.0)
    _train_flags(p)
    p.set_defaults(fn=cmd_baseline)

    p = sub.add_parser("sweep", help="label-fraction sweep")
    p.add_argument("--checkpoints", nargs="+", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--fractions", default="0.01,0.03,0.1,0.3,1.0")
    p.add_argument("--seeds", default="0,1,2")
    _train_flags(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("evaluate", help="score predictions or a checkpoint+head")
    p.add_argument("--predictions")
    p.add_argument("--checkpoint")
    p.add_argument("--head")
    p.add_argument("--manifest")
    p.add_argument("--split", default="test")
    p.add_argument("--input-size", dest="input_size", type=int)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("ensemble", help="softmax-sum ensemble of prediction CSVs")
    p.add_argument("--members", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_ensemble)

    p = sub.add_parser("embed", help="export embeddings as CSV")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--input-size", dest="input_size", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("gradcam", help="guided attribution triptychs")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--head", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--ids", default="")
    p.add_argument("--limit", type=int, default=8)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_gradcam)

    audit = sub.add_parser("audit", help="label audit workflow")
    audit_sub = audit.add_subparsers(dest="audit_command", required=True)

    p = audit_sub.add_parser("flag", help="flag prediction/label mismatches")
    p.add_argument("--predictions")
    p.add_argument("--fixture", choices=["archive"])
    p.add_argument("--manifest")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_audit_flag)

    p = audit_sub.add_parser("apply", help="apply verdicts, report corrected accuracy")
    p.add_argument("--predictions")
    p.add_argument("--fixture", choices=["archive"])
    p.add_argument("--ledger")
    p.add_argument("--out-dir")
    p.set_defaults(fn=cmd_audit_apply)

    p = audit_sub.add_parser("serve", help="run the HTTP review service")
    p.add_argument("--predictions")
    p.add_argument("--fixture", choices=["archive"])
    p.add_argument("--candidates")
    p.add_argument("--manifest")
    p.add_argument("--ledger", required=True)
    p.add_argument("--frontend", help="static UI directory to serve at /")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(fn=cmd_audit_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except RadRegionError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except (FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - internal failures
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
