import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

import advsem.server as server_mod
from advsem.dataset import load_bundled_vocabulary
from advsem.evaluation import JudgmentStore
from advsem.server import create_app
from advsem.target import Prediction, PredictionSet, Service, TargetDump, Version

from support import FIXTURES, smooth_image


@pytest.fixture(scope="module")
def vocabulary():
    return load_bundled_vocabulary()


def _mini_dump():
    # one image, two versions, one service -> 4 judgment keys
    def pset(version, labels):
        preds = tuple(
            Prediction(l, round(0.9 - 0.05 * i, 2)) for i, l in enumerate(labels)
        )
        return PredictionSet("img_a", version, Service.LABEL_DETECTION, preds)

    return TargetDump(
        sets=[pset(Version.ORI, ["Dog", "Snout"]), pset(Version.LOGIT, ["Kimono"])],
        metadata={"kind": "metadata"},
    )


def _mini_manifest():
    return {"img_a": (253, 614)}  # basenji -> kimono


@pytest.fixture
def client(tmp_path, taxonomy, vocabulary):
    store = JudgmentStore(tmp_path / "judgments.jsonl")
    app = create_app(
        dump=_mini_dump(),
        manifest=_mini_manifest(),
        vocabulary=vocabulary,
        taxonomy=taxonomy,
        store=store,
    )
    return TestClient(app)


class TestQueue:
    def test_next_item_shape(self, client):
        item = client.get("/api/queue/next").json()
        assert item["schema_version"] == 1
        assert item["image_id"] == "img_a"
        assert item["version"] == "ori"
        assert item["gt_label"] == "basenji"
        assert item["target_label"] == "kimono"
        assert [p["label"] for p in item["predictions"]] == ["Dog", "Snout"]
        assert item["mode"] == "targeted"  # queue walks targeted first
        marks = {m["label"]: m["related"] for m in item["auto_judgment"]["per_prediction"]}
        assert marks["Dog"] is False  # "Dog" is unrelated to the kimono target
        assert item["auto_judgment"]["verdict"] is False

    def test_post_removes_key_from_queue(self, client):
        first = client.get("/api/queue/next").json()
        body = {
            "image_id": first["image_id"],
            "version": first["version"],
            "service": first["service"],
            "mode": first["mode"],
            "verdict": first["auto_judgment"]["verdict"],
            "per_prediction": first["auto_judgment"]["per_prediction"],
            "judge_id": "j1",
        }
        resp = client.post("/api/judgments", json=body)
        assert resp.status_code == 201
        stored = resp.json()["stored"]
        assert stored["origin"] == "human"
        second = client.get("/api/queue/next").json()
        assert (
            second["image_id"], second["version"], second["service"], second["mode"]
        ) != (first["image_id"], first["version"], first["service"], first["mode"])

    def test_queue_drains_to_204(self, client):
        for _ in range(4):
            item = client.get("/api/queue/next").json()
            body = {
                "image_id": item["image_id"],
                "version": item["version"],
                "service": item["service"],
                "mode": item["mode"],
                "verdict": item["auto_judgment"]["verdict"],
                "per_prediction": item["auto_judgment"]["per_prediction"],
                "judge_id": "j1",
            }
            assert client.post("/api/judgments", json=body).status_code == 201
        assert client.get("/api/queue/next").status_code == 204
        progress = client.get("/api/progress").json()
        assert progress["judged"] == progress["total"] == 4


class TestValidation:
    def test_inconsistent_marks_yield_422(self, client):
        body = {
            "image_id": "img_a", "version": "ori", "service": "label_detection",
            "mode": "targeted", "verdict": True,
            "per_prediction": [
                {"label": "Dog", "related": False},
                {"label": "Snout", "related": False},
            ],
            "judge_id": "j1",
        }
        resp = client.post("/api/judgments", json=body)
        assert resp.status_code == 422
        assert "inconsistent" in str(resp.json()["detail"])

    def test_marks_must_match_stored_labels(self, client):
        body = {
            "image_id": "img_a", "version": "ori", "service": "label_detection",
            "mode": "targeted", "verdict": False,
            "per_prediction": [{"label": "NotInSet", "related": False}],
            "judge_id": "j1",
        }
        resp = client.post("/api/judgments", json=body)
        assert resp.status_code == 422
        assert "stored prediction labels" in str(resp.json()["detail"])

    def test_unknown_key_404(self, client):
        body = {
            "image_id": "nope", "version": "ori", "service": "label_detection",
            "mode": "targeted", "verdict": False, "per_prediction": [],
            "judge_id": "j1",
        }
        assert client.post("/api/judgments", json=body).status_code == 404

    def test_unknown_image_404(self, client):
        assert client.get("/api/images/img_zz").status_code == 404


class TestImages:
    def test_png_bytes_served(self, tmp_path, taxonomy, vocabulary):
        images_root = tmp_path / "imgs"
        (images_root / "ori").mkdir(parents=True)
        arr = (smooth_image(1, side=32) * 255).astype(np.uint8)
        Image.fromarray(arr).save(images_root / "ori" / "img_a.png")
        app = create_app(
            dump=_mini_dump(), manifest=_mini_manifest(), vocabulary=vocabulary,
            taxonomy=taxonomy, store=JudgmentStore(tmp_path / "j.jsonl"),
            images_root=images_root,
        )
        client = TestClient(app)
        resp = client.get("/api/images/img_a?version=ori")
        assert resp.status_code == 200
        assert resp.headers["content-type"] == "image/png"
        assert client.get("/api/images/img_a?version=logit").status_code == 404


class TestResults:
    def test_results_follow_store_updates(self, client):
        rows = client.get("/api/results").json()["rows"]
        ori_targeted = next(
            r for r in rows if r["version"] == "ori" and r["mode"] == "targeted"
        )
        assert ori_targeted["success_rate"] == 0.0
        # mark the ori/targeted key as a success and watch the rate move
        body = {
            "image_id": "img_a", "version": "ori", "service": "label_detection",
            "mode": "targeted", "verdict": True,
            "per_prediction": [
                {"label": "Dog", "related": True}, {"label": "Snout", "related": False}
            ],
            "judge_id": "j1", "note": "override for the test",
        }
        assert client.post("/api/judgments", json=body).status_code == 201
        rows = client.get("/api/results").json()["rows"]
        ori_targeted = next(
            r for r in rows if r["version"] == "ori" and r["mode"] == "targeted"
        )
        assert ori_targeted["success_rate"] == 100.0

    def test_verdict_math_is_delegated(self, tmp_path, taxonomy, vocabulary, monkeypatch):
        sentinel = [{"version": "ori", "service": "label_detection",
                     "mode": "targeted", "success_rate": 42.42}]
        monkeypatch.setattr(server_mod, "success_rate_rows", lambda *a, **k: sentinel)
        app = create_app(
            dump=_mini_dump(), manifest=_mini_manifest(), vocabulary=vocabulary,
            taxonomy=taxonomy, store=JudgmentStore(tmp_path / "j.jsonl"),
        )
        assert TestClient(app).get("/api/results").json()["rows"] == sentinel

    def test_prefill_is_delegated_to_auto_judge(
        self, tmp_path, taxonomy, vocabulary, monkeypatch
    ):
        calls = []
        import advsem.evaluation as ev

        real = ev.auto_judge

        def spy(*args, **kwargs):
            calls.append(args)
            return real(*args, **kwargs)

        monkeypatch.setattr(server_mod, "auto_judge", spy)
        create_app(
            dump=_mini_dump(), manifest=_mini_manifest(), vocabulary=vocabulary,
            taxonomy=taxonomy, store=JudgmentStore(tmp_path / "j.jsonl"),
        )
        assert len(calls) == 4  # one per queue key


class TestPaperShapedQueue:
    def test_progress_totals(self, tmp_path, taxonomy):
        from advsem.dataset import read_manifest
        from advsem.target import ingest_dump

        dump = ingest_dump(FIXTURES / "paper_dump.jsonl")
        manifest = {r[0]: (r[1], r[2]) for r in read_manifest(FIXTURES / "paper_manifest.csv")}
        app = create_app(
            dump=dump, manifest=manifest, vocabulary=load_bundled_vocabulary(),
            taxonomy=taxonomy, store=JudgmentStore(tmp_path / "j.jsonl"),
        )
        progress = TestClient(app).get("/api/progress").json()
        assert progress["total"] == 6400  # 400 images x 4 versions x 2 services x 2 modes
        assert progress["judged"] == 0
        assert progress["per_mode"]["targeted"]["total"] == 3200
