import json

import numpy as np
import pytest

from advsem.errors import DuplicateKeyError, LoadError, ValidationError
from advsem.models import linear_probe_model, tiny_conv_model
from advsem.target import (
    Prediction,
    PredictionSet,
    RemoteClientConfig,
    Service,
    TargetDump,
    Version,
    classify_surrogate,
    export_dump,
    ingest_dump,
    parse_remote_response,
    submit_remote,
)

from support import smooth_image


def _set(image_id="a", version=Version.ORI, service=Service.LABEL_DETECTION, confs=(0.9, 0.8)):
    return PredictionSet(
        image_id=image_id,
        version=version,
        service=service,
        predictions=tuple(Prediction(f"l{i}", c) for i, c in enumerate(confs)),
    )


class TestTypes:
    def test_confidence_bounds(self):
        with pytest.raises(ValidationError):
            Prediction("x", 1.2)
        with pytest.raises(ValidationError):
            Prediction("x", -0.1)

    def test_cap_of_ten(self):
        with pytest.raises(ValidationError, match="cap"):
            _set(confs=tuple(0.9 for _ in range(11)))

    def test_descending_confidences_enforced(self):
        with pytest.raises(ValidationError, match="non-increasing"):
            _set(confs=(0.7, 0.9))

    def test_duplicate_keys_rejected_in_dump(self):
        with pytest.raises(DuplicateKeyError):
            TargetDump(sets=[_set(), _set()])


class TestDumpIO:
    def test_paper_dump_shape(self, paper_dump):
        assert len(paper_dump.sets) == 3200  # 400 images x 4 versions x 2 services
        assert len(paper_dump.image_ids()) == 400
        for s in paper_dump.sets:
            assert len(s.predictions) <= 10
            confs = [p.confidence for p in s.predictions]
            assert all(a >= b for a, b in zip(confs, confs[1:]))
            assert all(c >= 0.5 for c in confs)

    def test_empty_sets_is_valid(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text('{"kind": "metadata", "source": "t"}\n')
        dump = ingest_dump(path)
        assert dump.sets == []
        assert dump.metadata["source"] == "t"

    def test_roundtrip_identity(self, tmp_path):
        dump = TargetDump(
            sets=[
                _set("a"),
                _set("b", version=Version.LOGIT, service=Service.OBJECT_LOCALIZATION),
                PredictionSet("c", Version.CE, Service.LABEL_DETECTION, ()),
            ],
            metadata={"kind": "metadata", "source": "unit", "min_confidence": 0.5},
        )
        path = tmp_path / "dump.jsonl"
        export_dump(dump, path)
        back = ingest_dump(path)
        assert back.sets == dump.sets
        assert back.metadata == dump.metadata

    def test_duplicate_key_error_names_line(self, tmp_path):
        path = tmp_path / "dup.jsonl"
        rec = json.dumps(
            {
                "image_id": "a", "version": "ori", "service": "label_detection",
                "predictions": [{"label": "x", "confidence": 0.8}],
            }
        )
        path.write_text('{"kind": "metadata"}\n' + rec + "\n" + rec + "\n")
        with pytest.raises(DuplicateKeyError, match=":3"):
            ingest_dump(path)

    def test_low_confidence_rejected_with_field(self, tmp_path):
        path = tmp_path / "low.jsonl"
        rec = json.dumps(
            {
                "image_id": "a", "version": "ori", "service": "label_detection",
                "predictions": [{"label": "x", "confidence": 0.44}],
            }
        )
        path.write_text('{"kind": "metadata"}\n' + rec + "\n")
        with pytest.raises(ValidationError, match=r"predictions\[0\].confidence"):
            ingest_dump(path)

    def test_metadata_floor_is_honored(self, tmp_path):
        path = tmp_path / "floor.jsonl"
        rec = json.dumps(
            {
                "image_id": "a", "version": "ori", "service": "label_detection",
                "predictions": [{"label": "x", "confidence": 0.44}],
            }
        )
        path.write_text('{"kind": "metadata", "min_confidence": 0.3}\n' + rec + "\n")
        dump = ingest_dump(path)
        assert dump.sets[0].predictions[0].confidence == 0.44

    def test_missing_field_named(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(
            '{"kind": "metadata"}\n'
            + json.dumps({"image_id": "a", "version": "ori", "service": "label_detection"})
            + "\n"
        )
        with pytest.raises(ValidationError, match="'predictions'"):
            ingest_dump(path)

    def test_unknown_version_named(self, tmp_path):
        path = tmp_path / "ver.jsonl"
        path.write_text(
            json.dumps(
                {
                    "image_id": "a", "version": "bogus", "service": "label_detection",
                    "predictions": [],
                }
            )
            + "\n"
        )
        with pytest.raises(ValidationError, match="bogus"):
            ingest_dump(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(LoadError):
            ingest_dump(tmp_path / "nope.jsonl")


class TestSurrogate:
    def test_saturated_class_gives_single_prediction(self):
        width = 8
        matrix = np.zeros((6, 3 * width * width), dtype=np.float32)
        matrix[2, :] = 1.0  # one class dominates every input
        model = linear_probe_model(matrix, input_width=width)
        pset = classify_surrogate(
            model, smooth_image(0, side=width), Service.LABEL_DETECTION,
            image_id="x", floor=0.5,
        )
        assert len(pset.predictions) == 1
        assert pset.predictions[0].label == "class_2"

    def test_uniform_logits_contract_faithful_is_empty(self):
        width = 8
        matrix = np.zeros((1000, 3 * width * width), dtype=np.float32)
        model = linear_probe_model(matrix, input_width=width)
        pset = classify_surrogate(
            model, smooth_image(1, side=width), Service.LABEL_DETECTION, floor=0.5
        )
        assert pset.predictions == ()

    def test_matches_topk_filter_oracle(self, tiny_model):
        image = smooth_image(2, side=64)
        pset = classify_surrogate(
            tiny_model, image, Service.LABEL_DETECTION, image_id="img", floor=0.0
        )
        # independent recomputation: full softmax, sort, cap
        import torch

        with torch.no_grad():
            logits = tiny_model.forward_t(
                torch.from_numpy(image).permute(2, 0, 1)
            ).numpy()
        scores = np.exp(logits - logits.max())
        scores = scores / scores.sum()
        order = np.argsort(-scores, kind="stable")[:10]
        assert [p.label for p in pset.predictions] == [f"class_{i}" for i in order]
        for p, idx in zip(pset.predictions, order):
            assert p.confidence == pytest.approx(scores[idx], rel=1e-5)

    def test_object_localization_caps_at_five(self, tiny_model):
        pset = classify_surrogate(
            tiny_model, smooth_image(3, side=64), Service.OBJECT_LOCALIZATION, floor=0.0
        )
        assert len(pset.predictions) <= 5

    def test_class_names_used(self, tiny_model):
        names = [f"name {i}" for i in range(10)]
        pset = classify_surrogate(
            tiny_model, smooth_image(4, side=64), Service.LABEL_DETECTION,
            class_names=names, floor=0.0,
        )
        assert all(p.label.startswith("name ") for p in pset.predictions)


class TestRemote:
    def test_mapper_truncates_and_filters(self):
        payload = {
            "responses": [
                {
                    "labelAnnotations": [
                        {"description": f"lab{i}", "score": 0.95 - i * 0.03}
                        for i in range(12)
                    ]
                }
            ]
        }
        pset = parse_remote_response(payload, "img", Version.ORI, Service.LABEL_DETECTION)
        assert len(pset.predictions) == 10
        assert all(p.confidence >= 0.5 for p in pset.predictions)

    def test_mapper_zero_labels(self):
        pset = parse_remote_response(
            {"responses": [{}]}, "img", Version.ORI, Service.LABEL_DETECTION
        )
        assert pset.predictions == ()

    def test_mapper_fixture_roundtrip(self):
        payload = {
            "responses": [
                {
                    "localizedObjectAnnotations": [
                        {"name": "Dog", "score": 0.93},
                        {"name": "Snout", "score": 0.61},
                        {"name": "Toy", "score": 0.42},
                    ]
                }
            ]
        }
        pset = parse_remote_response(
            payload, "img_1", Version.LOGIT, Service.OBJECT_LOCALIZATION
        )
        want = PredictionSet(
            "img_1", Version.LOGIT, Service.OBJECT_LOCALIZATION,
            (Prediction("Dog", 0.93), Prediction("Snout", 0.61)),
        )
        assert pset == want

    def test_malformed_response(self):
        with pytest.raises(ValidationError, match="malformed"):
            parse_remote_response({}, "x", Version.ORI, Service.LABEL_DETECTION)

    def test_disabled_by_default(self, tmp_path):
        config = RemoteClientConfig(endpoint="http://x", credentials_path=str(tmp_path / "c"))
        with pytest.raises(ValidationError, match="disabled"):
            submit_remote(config, tmp_path / "img.png", Service.LABEL_DETECTION, "a", Version.ORI)

    def test_enabled_requires_credentials(self, tmp_path):
        config = RemoteClientConfig(
            endpoint="http://x", credentials_path=str(tmp_path / "absent"), enabled=True
        )
        with pytest.raises(LoadError, match="credentials"):
            submit_remote(config, tmp_path / "img.png", Service.LABEL_DETECTION, "a", Version.ORI)
