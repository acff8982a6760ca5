import csv
import hashlib
import json

import numpy as np
import pytest
from PIL import Image

from advsem.cli import main

from support import FIXTURES, smooth_image


def _write_dataset(root, n=2):
    (root / "images").mkdir(parents=True)
    with open(root / "manifest.csv", "w") as fh:
        fh.write("image_id,gt_class_index,target_class_index\n")
        for i in range(n):
            fh.write(f"img_{i:02d},{i % 5},{5 + i % 5}\n")
            arr = (smooth_image(400 + i) * 255).astype(np.uint8)
            Image.fromarray(arr, mode="RGB").save(root / "images" / f"img_{i:02d}.png")
    return root


def _sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture
def dataset_root(tmp_path):
    return _write_dataset(tmp_path / "ds")


class TestEvaluateCommand:
    def test_table1_contains_paper_row(self, tmp_path):
        out = tmp_path / "out"
        rc = main([
            "evaluate",
            "--dump", str(FIXTURES / "paper_dump.jsonl"),
            "--manifest", str(FIXTURES / "paper_manifest.csv"),
            "--judgments", str(FIXTURES / "paper_judgments.jsonl"),
            "--out-dir", str(out),
        ])
        assert rc == 0
        content = (out / "table1.csv").read_text()
        assert "logit,label_detection,targeted,6.25" in content

    def test_idempotent_over_unchanged_inputs(self, tmp_path):
        args = [
            "evaluate",
            "--dump", str(FIXTURES / "paper_dump.jsonl"),
            "--manifest", str(FIXTURES / "paper_manifest.csv"),
            "--judgments", str(FIXTURES / "paper_judgments.jsonl"),
            "--out-dir", str(tmp_path / "out"),
        ]
        assert main(args) == 0
        first = {
            p.name: _sha(p) for p in (tmp_path / "out").iterdir() if p.is_file()
        }
        assert main(args) == 0
        second = {
            p.name: _sha(p) for p in (tmp_path / "out").iterdir() if p.is_file()
        }
        assert first == second

    def test_partial_dump_is_coverage_error(self, tmp_path, capsys):
        # drop one image's sets from the manifest scope: truncate the dump
        src = (FIXTURES / "paper_dump.jsonl").read_text().splitlines()
        trimmed = [src[0]] + [
            line for line in src[1:]
            if not (json.loads(line)["image_id"] == "img_0400"
                    and json.loads(line)["service"] == "label_detection")
        ]
        dump = tmp_path / "partial.jsonl"
        dump.write_text("\n".join(trimmed) + "\n")
        rc = main([
            "evaluate",
            "--dump", str(dump),
            "--manifest", str(FIXTURES / "paper_manifest.csv"),
            "--out-dir", str(tmp_path / "out"),
        ])
        assert rc == 3
        err = capsys.readouterr().err
        assert "img_0400" in err

    def test_missing_dump_is_error(self, tmp_path, capsys):
        rc = main([
            "evaluate", "--dump", str(tmp_path / "none.jsonl"),
            "--manifest", str(FIXTURES / "paper_manifest.csv"),
        ])
        assert rc == 2
        assert "error" in capsys.readouterr().err


class TestAnalyzeCommand:
    def test_quantity_first_cell(self, tmp_path):
        out = tmp_path / "out"
        rc = main([
            "analyze", "--dump", str(FIXTURES / "paper_dump.jsonl"), "--out-dir", str(out)
        ])
        assert rc == 0
        with open(out / "table2_quantity.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[1][0] == "object_localization"
        assert rows[1][1] == "2.58"
        fig3 = json.loads((out / "fig3_label_detection.json").read_text())
        assert fig3["schema_version"] == 1
        assert len(fig3["rows"]) >= 10


class TestAttackCommand:
    def test_deterministic_png_output(self, dataset_root, tmp_path):
        common = [
            "attack", "--dataset", str(dataset_root), "--loss", "logit",
            "--images", "1", "--seed", "7", "--iterations", "2",
            "--tiny-members", "1",
        ]
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(common + ["--out", str(out_a)]) == 0
        assert main(common + ["--out", str(out_b)]) == 0
        png_a = out_a / "logit" / "img_00.png"
        png_b = out_b / "logit" / "img_00.png"
        assert _sha(png_a) == _sha(png_b)
        trace = (out_a / "logit" / "img_00_trace.csv").read_text().splitlines()
        assert trace[0] == "iteration,loss,target_logit_mean"
        assert len(trace) == 3

    def test_budget_respected_after_quantization(self, dataset_root, tmp_path):
        out = tmp_path / "adv"
        assert main([
            "attack", "--dataset", str(dataset_root), "--loss", "ce",
            "--images", "1", "--iterations", "2", "--epsilon", "16",
            "--tiny-members", "1", "--out", str(out),
        ]) == 0
        adv = np.asarray(Image.open(out / "ce" / "img_00.png"), dtype=np.int16)
        ori = np.asarray(
            Image.open(dataset_root / "images" / "img_00.png"), dtype=np.int16
        )
        assert np.abs(adv - ori).max() <= 16


class TestConfigPrecedence:
    def test_flags_beat_config_file(self, dataset_root, tmp_path):
        config = tmp_path / "cfg.yaml"
        config.write_text("images: 2\niterations: 1\ntiny_members: 1\nloss: logit\n")
        out = tmp_path / "o"
        rc = main([
            "--config", str(config),
            "attack", "--dataset", str(dataset_root), "--images", "1",
            "--out", str(out),
        ])
        assert rc == 0
        assert (out / "logit" / "img_00.png").exists()
        assert not (out / "logit" / "img_01.png").exists()  # flag overrode images: 2

    def test_bad_config_rejected(self, tmp_path, capsys):
        config = tmp_path / "cfg.yaml"
        config.write_text("- just\n- a list\n")
        rc = main(["--config", str(config), "analyze", "--dump", "x"])
        assert rc == 2
        assert "mapping" in capsys.readouterr().err


class TestArgparseErrors:
    def test_unknown_flag_exits_nonzero(self):
        with pytest.raises(SystemExit) as exc:
            main(["analyze", "--bogus"])
        assert exc.value.code == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2


class TestClassifyCommand:
    def test_surrogate_dump_roundtrips(self, dataset_root, tmp_path):
        images_root = tmp_path / "versions"
        (images_root / "ori").mkdir(parents=True)
        for png in (dataset_root / "images").glob("*.png"):
            (images_root / "ori" / png.name).write_bytes(png.read_bytes())
        out = tmp_path / "dump.jsonl"
        rc = main([
            "classify", "--images-root", str(images_root), "--out", str(out),
            "--versions", "ori",
        ])
        assert rc == 0
        from advsem.target import ingest_dump

        dump = ingest_dump(out)
        assert len(dump.sets) == 4  # 2 images x 2 services
        assert {s.service.value for s in dump.sets} == {
            "object_localization", "label_detection"
        }
