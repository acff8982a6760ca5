"""Command-line interface: attack, classify, evaluate, analyze, report, serve.

Every command except ``serve`` is idempotent over unchanged inputs: the
same inputs produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import analysis, figures
from .attack import AttackConfig, LossKind, run_attack, save_adversarial_png, write_trace_csv
from .config import ConfigResolver, load_config_file
from .dataset import (
    LabelVocabulary,
    load_bundled_vocabulary,
    load_dataset,
    load_vocabulary,
    read_manifest,
)
from .errors import AdvsemError, CoverageError, ValidationError
from .evaluation import (
    JudgmentStore,
    Mode,
    auto_judge,
    success_rate_table,
)
from .models import Ensemble, build_registry_ensemble, tiny_conv_model
from .target import Service, TargetDump, Version, classify_surrogate, export_dump, ingest_dump
from .taxonomy import RelatednessPolicy, load_bundled_taxonomy, load_taxonomy

VERSIONS = [v.value for v in Version]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advsem",
        description="Targeted transfer attacks evaluated by semantic mismatch.",
    )
    parser.add_argument("--config", help="YAML config file; flags override its keys")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("attack", help="generate adversarial images and traces")
    p.add_argument("--dataset", help="dataset root (manifest.csv + images/)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--loss", choices=[k.value for k in LossKind] + ["all"])
    p.add_argument("--images", type=int, help="number of records to attack")
    p.add_argument("--seed", type=int, help="base RNG seed")
    p.add_argument("--iterations", type=int)
    p.add_argument("--epsilon", type=float, help="L-inf budget on the 0-255 scale")
    p.add_argument("--step", type=float, help="step size on the 0-255 scale")
    p.add_argument("--mu", type=float, help="momentum decay")
    p.add_argument("--ti-radius", type=int, dest="ti_radius")
    p.add_argument("--di-prob", type=float, dest="di_prob")
    p.add_argument("--registry", help="pretrained model registry YAML (default: tiny models)")
    p.add_argument("--tiny-members", type=int, dest="tiny_members")
    p.add_argument("--tiny-classes", type=int, dest="tiny_classes")
    p.add_argument("--tiny-width", type=int, dest="tiny_width")

    p = sub.add_parser("classify", help="classify image versions into a dump file")
    p.add_argument("--images-root", dest="images_root",
                   help="directory with <version>/<id>.png trees")
    p.add_argument("--out", help="output dump path (.jsonl)")
    p.add_argument("--mode", choices=["surrogate", "remote"])
    p.add_argument("--versions", help="comma-separated subset of " + ",".join(VERSIONS))
    p.add_argument("--surrogate-seed", type=int, dest="surrogate_seed")
    p.add_argument("--surrogate-classes", type=int, dest="surrogate_classes")
    p.add_argument("--floor", type=float, help="confidence floor override")
    p.add_argument("--vocabulary", help="class-name file for surrogate labels")

    p = sub.add_parser("evaluate", help="judge a dump and emit success rates")
    p.add_argument("--dump", help="prediction dump (.jsonl)")
    p.add_argument("--manifest", help="manifest with gt/target labels per image")
    p.add_argument("--judgments", help="human judgment log (.jsonl)")
    p.add_argument("--taxonomy", help="taxonomy TSV (default: bundled)")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--allow-gt-broader", action="store_const", const=True,
                   dest="allow_gt_broader")
    p.add_argument("--lca-threshold", type=int, dest="lca_threshold")

    p = sub.add_parser("analyze", help="prediction-pattern statistics from a dump")
    p.add_argument("--dump")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--top-k", type=int, dest="top_k")

    p = sub.add_parser("report", help="consolidated tables, plot data, and figures")
    p.add_argument("--dump")
    p.add_argument("--manifest")
    p.add_argument("--judgments")
    p.add_argument("--taxonomy")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--top-k", type=int, dest="top_k")

    p = sub.add_parser("serve", help="HTTP service for the adjudication UI")
    p.add_argument("--dump")
    p.add_argument("--manifest")
    p.add_argument("--judgments")
    p.add_argument("--taxonomy")
    p.add_argument("--images-root", dest="images_root")
    p.add_argument("--ui-dir", dest="ui_dir")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    return parser


def _tiny_ensemble(resolver: ConfigResolver) -> Ensemble:
    members = resolver.get("tiny_members", 2, int)
    classes = resolver.get("tiny_classes", 10, int)
    width = resolver.get("tiny_width", 64, int)
    seed = resolver.get("seed", 0, int)
    return Ensemble(
        tuple(
            tiny_conv_model(f"tiny{m}", seed=seed + m, num_classes=classes, input_width=width)
            for m in range(members)
        )
    )


def _load_ensemble(resolver: ConfigResolver) -> Ensemble:
    registry_path = resolver.get("registry")
    if registry_path:
        registry = load_config_file(registry_path)
        return build_registry_ensemble(registry)
    return _tiny_ensemble(resolver)


def _load_taxonomy(resolver: ConfigResolver):
    path = resolver.get("taxonomy")
    return load_taxonomy(path) if path else load_bundled_taxonomy()


def _vocab_for(resolver: ConfigResolver) -> LabelVocabulary:
    path = resolver.get("vocabulary")
    return load_vocabulary(path) if path else load_bundled_vocabulary()


def cmd_attack(resolver: ConfigResolver) -> int:
    dataset_root = resolver.require("dataset")
    out_dir = Path(resolver.require("out"))
    loss_flag = resolver.get("loss", "all")
    losses = list(LossKind) if loss_flag == "all" else [LossKind(loss_flag)]
    count = resolver.get("images", 1, int)
    seed = resolver.get("seed", 0, int)
    ensemble = _load_ensemble(resolver)
    records = load_dataset(dataset_root, count)
    for loss_kind in losses:
        loss_dir = out_dir / loss_kind.value
        loss_dir.mkdir(parents=True, exist_ok=True)
        for record in records:
            config = AttackConfig(
                loss_kind=loss_kind,
                epsilon=resolver.get("epsilon", 16.0, float) / 255.0,
                step_size=resolver.get("step", 2.0, float) / 255.0,
                iterations=resolver.get("iterations", 300, int),
                momentum_mu=resolver.get("mu", 1.0, float),
                ti_kernel_radius=resolver.get("ti_radius", 2, int),
                di_probability=resolver.get("di_prob", 0.7, float),
                rng_seed=seed,
            )
            adv, trace = run_attack(record, config, ensemble)
            save_adversarial_png(loss_dir / f"{record.id}.png", adv)
            write_trace_csv(loss_dir / f"{record.id}_trace.csv", trace)
            print(
                f"{loss_kind.value} {record.id}: final loss {trace.losses[-1]:.4f}, "
                f"target ranks {trace.final_target_ranks}"
            )
    return 0


def cmd_classify(resolver: ConfigResolver) -> int:
    mode = resolver.get("mode", "surrogate")
    if mode == "remote":
        raise ValidationError(
            "remote classification requires explicit client configuration; "
            "use the target.submit_remote API with enabled=True"
        )
    images_root = Path(resolver.require("images_root"))
    out_path = Path(resolver.require("out"))
    versions_flag = resolver.get("versions")
    versions = (
        [Version(v.strip()) for v in versions_flag.split(",")] if versions_flag else list(Version)
    )
    classes = resolver.get("surrogate_classes", 10, int)
    surrogate = tiny_conv_model(
        "surrogate", seed=resolver.get("surrogate_seed", 1000, int), num_classes=classes
    )
    if classes == 1000:
        vocab = _vocab_for(resolver)
        class_names = [vocab.name_of(i) for i in range(1000)]
    else:
        class_names = [f"class_{i}" for i in range(classes)]
    floor = resolver.get("floor", None, float)

    from .dataset import _decode_png  # shares the strict PNG contract

    sets = []
    for version in versions:
        version_dir = images_root / version.value
        if not version_dir.is_dir():
            raise ValidationError(f"missing image directory: {version_dir}")
        for png in sorted(version_dir.glob("*.png")):
            pixels = _decode_png(png, png.stem)
            for service in Service:
                sets.append(
                    classify_surrogate(
                        surrogate, pixels, service,
                        image_id=png.stem, version=version,
                        class_names=class_names, floor=floor,
                    )
                )
    min_conf = min(
        (p.confidence for s in sets for p in s.predictions), default=0.5
    )
    dump = TargetDump(
        sets=sets,
        metadata={
            "kind": "metadata",
            "source": f"surrogate:{surrogate.name}",
            "min_confidence": min(0.5, min_conf),
        },
    )
    export_dump(dump, out_path)
    print(f"wrote {len(sets)} prediction sets to {out_path}")
    return 0


def _evaluate_store(resolver: ConfigResolver, dump: TargetDump) -> tuple[JudgmentStore, list[str]]:
    manifest_path = resolver.require("manifest")
    manifest = {row[0]: (row[1], row[2]) for row in read_manifest(manifest_path)}
    vocab = _vocab_for(resolver)
    taxonomy = _load_taxonomy(resolver)
    policy = RelatednessPolicy(
        allow_gt_broader=bool(resolver.get("allow_gt_broader", False)),
        lca_distance_threshold=resolver.get("lca_threshold", 0, int),
    )
    image_ids = dump.image_ids()
    missing = [i for i in image_ids if i not in manifest]
    if missing:
        raise CoverageError([(i, "*", "*", "*") for i in missing])

    auto_timestamp = str(dump.metadata.get("capture_date", "1970-01-01")) + "T00:00:00+00:00"
    store = JudgmentStore()
    autos = []
    for pset in dump.sets:
        gt_idx, tgt_idx = manifest[pset.image_id]
        gt_name, tgt_name = vocab.name_of(gt_idx), vocab.name_of(tgt_idx)
        for mode in Mode:
            j = auto_judge(pset, gt_name, tgt_name, mode, taxonomy, policy)
            autos.append(replace(j, timestamp=auto_timestamp))
    store.extend(autos)
    judgments_path = resolver.get("judgments")
    if judgments_path:
        human = JudgmentStore(judgments_path)
        store.extend(human.all_judgments())
    return store, image_ids


def cmd_evaluate(resolver: ConfigResolver) -> int:
    dump = ingest_dump(resolver.require("dump"))
    out_dir = Path(resolver.get("out_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    store, image_ids = _evaluate_store(resolver, dump)
    rows = success_rate_table(store, image_ids)
    analysis.write_table1_csv(rows, out_dir / "table1.csv")
    # the merged view for audit: human judgments already override automatic ones
    merged_path = out_dir / "judgments_effective.jsonl"
    effective = store.effective_by_key()
    with open(merged_path, "w", encoding="utf-8") as fh:
        for key in sorted(effective):
            fh.write(json.dumps(effective[key].to_json_obj(), sort_keys=True) + "\n")
    print(f"wrote {out_dir / 'table1.csv'} and {merged_path}")
    return 0


def cmd_analyze(resolver: ConfigResolver) -> int:
    dump = ingest_dump(resolver.require("dump"))
    out_dir = Path(resolver.get("out_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    analysis.write_table2_quantity_csv(dump, out_dir / "table2_quantity.csv")
    analysis.write_table2_diversity_csv(dump, out_dir / "table2_diversity.csv")
    k = resolver.get("top_k", 10, int)
    for service in Service:
        analysis.write_fig3_json(dump, service, out_dir / f"fig3_{service.value}.json", k=k)
    print(f"wrote table2 and fig3 data to {out_dir}")
    return 0


def cmd_report(resolver: ConfigResolver) -> int:
    cmd_evaluate(resolver)
    cmd_analyze(resolver)
    out_dir = Path(resolver.get("out_dir", "."))
    import csv as _csv

    with open(out_dir / "table1.csv", newline="", encoding="utf-8") as fh:
        rows = [
            {
                "version": r["version"],
                "service": r["service"],
                "mode": r["mode"],
                "success_rate": float(r["success_rate"]),
            }
            for r in _csv.DictReader(fh)
        ]
    figures.render_success_rates_png(rows, out_dir / "success_rates.png")
    for service in Service:
        figures.render_fig3_png(
            out_dir / f"fig3_{service.value}.json", out_dir / f"fig3_{service.value}.png"
        )
    print(f"report complete in {out_dir}")
    return 0


def cmd_serve(resolver: ConfigResolver) -> int:
    import uvicorn

    from .server import create_app

    dump = ingest_dump(resolver.require("dump"))
    manifest = {row[0]: (row[1], row[2]) for row in read_manifest(resolver.require("manifest"))}
    store = JudgmentStore(resolver.require("judgments"))
    app = create_app(
        dump=dump,
        manifest=manifest,
        vocabulary=_vocab_for(resolver),
        taxonomy=_load_taxonomy(resolver),
        store=store,
        images_root=resolver.get("images_root"),
        ui_dir=resolver.get("ui_dir"),
    )
    uvicorn.run(app, host=resolver.get("host", "127.0.0.1"), port=resolver.get("port", 8008, int))
    return 0


_COMMANDS = {
    "attack": cmd_attack,
    "classify": cmd_classify,
    "evaluate": cmd_evaluate,
    "analyze": cmd_analyze,
    "report": cmd_report,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config_file(args.config)
        resolver = ConfigResolver(args, config)
        return _COMMANDS[args.command](resolver)
    except CoverageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for key in exc.missing_keys[:50]:
            print(f"  missing judgment: {key}", file=sys.stderr)
        return 3
    except AdvsemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
