"""HTTP service for the human-adjudication workflow.

Serves the judgment queue, image bytes, progress, and live success rates;
accepts human judgments and appends them to the store.  Verdict rules are
never evaluated here: the automatic pre-fills come from
:func:`advsem.evaluation.auto_judge` and validation happens inside the
:class:`advsem.evaluation.Judgment` type, so this layer stays a thin
transport.
"""

from __future__ import annotations

from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .dataset import LabelVocabulary
from .errors import ValidationError
from .evaluation import (
    Judgment,
    JudgmentStore,
    Mode,
    Origin,
    auto_judge,
    success_rate_rows,
)
from .target import Service, TargetDump, Version
from .taxonomy import RelatednessPolicy, Taxonomy

SCHEMA_VERSION = 1

_VERSION_ORDER = {v: i for i, v in enumerate(Version)}
_SERVICE_ORDER = {s: i for i, s in enumerate(Service)}
_MODE_ORDER = {m: i for i, m in enumerate(Mode)}


class MarkBody(BaseModel):
    label: str
    related: bool


class JudgmentBody(BaseModel):
    image_id: str
    version: str
    service: str
    mode: str
    verdict: bool
    per_prediction: list[MarkBody] = Field(default_factory=list)
    judge_id: str
    note: str = ""


def create_app(
    dump: TargetDump,
    manifest: dict[str, tuple[int, int]],
    vocabulary: LabelVocabulary,
    taxonomy: Taxonomy,
    store: JudgmentStore,
    policy: RelatednessPolicy | None = None,
    images_root: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="advsem adjudication service")
    policy = policy or RelatednessPolicy()
    images_root = Path(images_root) if images_root else None

    sets_by_key = dump.by_key()
    keys: list[tuple] = []  # (image_id, Version, Service, Mode)
    for pset in dump.sets:
        for mode in Mode:
            keys.append((pset.image_id, pset.version, pset.service, mode))
    keys.sort(
        key=lambda k: (k[0], _VERSION_ORDER[k[1]], _SERVICE_ORDER[k[2]], _MODE_ORDER[k[3]])
    )

    auto_judgments: dict[tuple, Judgment] = {}
    for image_id, version, service, mode in keys:
        pset = sets_by_key[(image_id, version.value, service.value)]
        gt_idx, tgt_idx = manifest[image_id]
        auto_judgments[(image_id, version, service, mode)] = auto_judge(
            pset, vocabulary.name_of(gt_idx), vocabulary.name_of(tgt_idx),
            mode, taxonomy, policy,
        )

    def human_done() -> set:
        return store.human_keys()

    def queue_pending() -> list[tuple]:
        done = human_done()
        return [
            k for k in keys if (k[0], k[1].value, k[2].value, k[3].value) not in done
        ]

    @app.get("/api/queue/next")
    def queue_next():
        pending = queue_pending()
        if not pending:
            return Response(status_code=204)
        image_id, version, service, mode = pending[0]
        pset = sets_by_key[(image_id, version.value, service.value)]
        gt_idx, tgt_idx = manifest[image_id]
        auto = auto_judgments[(image_id, version, service, mode)]
        total = len(keys)
        return JSONResponse(
            {
                "schema_version": SCHEMA_VERSION,
                "image_id": image_id,
                "version": version.value,
                "service": service.value,
                "mode": mode.value,
                "session_group": image_id,
                "gt_label": vocabulary.name_of(gt_idx),
                "target_label": vocabulary.name_of(tgt_idx),
                "image_ori_url": f"/api/images/{image_id}?version=ori",
                "image_adv_url": f"/api/images/{image_id}?version={version.value}",
                "predictions": [
                    {"label": p.label, "confidence": p.confidence} for p in pset.predictions
                ],
                "auto_judgment": {
                    "verdict": auto.verdict,
                    "per_prediction": [
                        {"label": label, "related": related}
                        for label, related in auto.per_prediction
                    ],
                    "note": auto.note,
                },
                "position": {"judged": total - len(pending), "total": total},
            }
        )

    @app.get("/api/images/{image_id}")
    def image_bytes(image_id: str, version: str = "ori"):
        if images_root is None:
            raise HTTPException(status_code=404, detail="no images directory configured")
        try:
            version_value = Version(version).value
        except ValueError:
            raise HTTPException(status_code=404, detail=f"unknown version {version!r}") from None
        path = images_root / version_value / f"{image_id}.png"
        if image_id not in manifest or not path.exists():
            raise HTTPException(status_code=404, detail=f"no image for {image_id!r}")
        return FileResponse(path, media_type="image/png")

    @app.post("/api/judgments", status_code=201)
    def post_judgment(body: JudgmentBody):
        try:
            version = Version(body.version)
            service = Service(body.service)
            mode = Mode(body.mode)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        pset = sets_by_key.get((body.image_id, version.value, service.value))
        if pset is None:
            raise HTTPException(
                status_code=404, detail=f"unknown image/version/service {body.image_id!r}"
            )
        if sorted(m.label for m in body.per_prediction) != sorted(pset.labels()):
            raise HTTPException(
                status_code=422,
                detail=[{
                    "loc": ["body", "per_prediction"],
                    "msg": "marks must cover exactly the stored prediction labels",
                    "type": "value_error",
                }],
            )
        try:
            judgment = Judgment(
                image_id=body.image_id,
                version=version,
                service=service,
                mode=mode,
                verdict=body.verdict,
                origin=Origin.HUMAN,
                per_prediction=tuple((m.label, m.related) for m in body.per_prediction),
                judge_id=body.judge_id,
                note=body.note,
                timestamp=datetime.now(timezone.utc).isoformat(),
            )
        except ValidationError as exc:
            raise HTTPException(
                status_code=422,
                detail=[{"loc": ["body", "verdict"], "msg": str(exc), "type": "value_error"}],
            ) from None
        store.append(judgment)
        return {"schema_version": SCHEMA_VERSION, "stored": judgment.to_json_obj()}

    @app.get("/api/progress")
    def progress():
        done = human_done()
        per_mode = {}
        for mode in Mode:
            mode_keys = [k for k in keys if k[3] is mode]
            judged = sum(
                1 for k in mode_keys if (k[0], k[1].value, k[2].value, k[3].value) in done
            )
            per_mode[mode.value] = {"judged": judged, "total": len(mode_keys)}
        return {
            "schema_version": SCHEMA_VERSION,
            "judged": sum(v["judged"] for v in per_mode.values()),
            "total": len(keys),
            "per_mode": per_mode,
        }

    @app.get("/api/results")
    def results():
        merged = JudgmentStore()
        merged.extend(auto_judgments.values())
        merged.extend(store.all_judgments())
        slices = sorted(
            {(s.version, s.service) for s in dump.sets},
            key=lambda t: (_VERSION_ORDER[t[0]], _SERVICE_ORDER[t[1]]),
        )
        rows = success_rate_rows(merged, dump.image_ids(), slices)
        return {"schema_version": SCHEMA_VERSION, "rows": rows}

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
