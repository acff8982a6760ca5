"""Evaluation image set: 299x299 images with ground-truth and target labels.

Layout on disk: ``<root>/manifest.csv`` (columns image_id, gt_class_index,
target_class_index) and ``<root>/images/<id>.png``.  Images are stored as
lossless PNG and decoded to float pixels in [0, 1]; nothing is resized, a
wrong-size image is an error.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import LoadError, RangeError, ValidationError

IMAGE_SIDE = 299
VOCAB_SIZE = 1000

__all__ = [
    "LabelRef",
    "LabelVocabulary",
    "ImageRecord",
    "load_vocabulary",
    "load_bundled_vocabulary",
    "read_manifest",
    "load_dataset",
    "unique_label_counts",
    "IMAGE_SIDE",
    "VOCAB_SIZE",
]


@dataclass(frozen=True)
class LabelRef:
    class_index: int
    name: str


class LabelVocabulary:
    """The 1000-entry class-index/name bijection."""

    def __init__(self, entries: list[tuple[int, str]]):
        if len(entries) != VOCAB_SIZE:
            raise ValidationError(f"vocabulary must have {VOCAB_SIZE} entries, got {len(entries)}")
        from .taxonomy import normalize_label

        self._by_index: dict[int, str] = {}
        seen_names: dict[str, int] = {}
        for idx, name in entries:
            if not 0 <= idx < VOCAB_SIZE:
                raise ValidationError(f"class index {idx} out of [0, {VOCAB_SIZE})")
            if idx in self._by_index:
                raise ValidationError(f"duplicate class index {idx}")
            canon = normalize_label(name)
            if canon in seen_names:
                raise ValidationError(
                    f"duplicate name {name!r} (classes {seen_names[canon]} and {idx})"
                )
            seen_names[canon] = idx
            self._by_index[idx] = name
        self._by_name = dict(seen_names)  # canonical name -> index

    def name_of(self, class_index: int) -> str:
        try:
            return self._by_index[class_index]
        except KeyError:
            raise RangeError(f"class index {class_index} out of [0, {VOCAB_SIZE})") from None

    def index_of(self, name: str) -> int:
        from .taxonomy import normalize_label

        canon = normalize_label(name)
        try:
            return self._by_name[canon]
        except KeyError:
            raise RangeError(f"unknown class name {name!r}") from None

    def ref(self, class_index: int) -> LabelRef:
        return LabelRef(class_index, self.name_of(class_index))

    def __len__(self) -> int:
        return VOCAB_SIZE


def load_vocabulary(path: str | Path) -> LabelVocabulary:
    path = Path(path)
    if not path.exists():
        raise LoadError(f"vocabulary file not found: {path}")
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            idx_s, name = line.split("\t", 1)
            entries.append((int(idx_s), name.strip()))
        except ValueError:
            raise LoadError(f"{path}:{lineno}: expected '<index>\\t<name>'") from None
    return LabelVocabulary(entries)


def load_bundled_vocabulary() -> LabelVocabulary:
    ref = resources.files("advsem.data").joinpath("imagenet_vocabulary.tsv")
    with resources.as_file(ref) as path:
        return load_vocabulary(path)


@dataclass(frozen=True)
class ImageRecord:
    """One evaluation image with its ground-truth and assigned target label."""

    id: str
    pixels: np.ndarray  # float32, (299, 299, 3), values in [0, 1], read-only
    gt_label: LabelRef
    target_label: LabelRef

    def __post_init__(self):
        px = self.pixels
        if px.shape != (IMAGE_SIDE, IMAGE_SIDE, 3):
            raise ValidationError(
                f"record {self.id!r}: image must be {IMAGE_SIDE}x{IMAGE_SIDE}x3, got {px.shape}"
            )
        if px.min() < 0.0 or px.max() > 1.0:
            raise ValidationError(f"record {self.id!r}: pixel values outside [0, 1]")
        if self.gt_label.class_index == self.target_label.class_index:
            raise ValidationError(f"record {self.id!r}: gt and target labels are equal")


def read_manifest(path: str | Path) -> list[tuple[str, int, int]]:
    """Parse manifest rows as (image_id, gt_index, target_index), in file order."""
    path = Path(path)
    if not path.exists():
        raise LoadError(f"manifest file not found: {path}")
    rows: list[tuple[str, int, int]] = []
    seen: set[str] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"image_id", "gt_class_index", "target_class_index"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise LoadError(f"{path}: manifest header must contain {sorted(required)}")
        for lineno, row in enumerate(reader, 2):
            image_id = row["image_id"].strip()
            if not image_id:
                raise LoadError(f"{path}:{lineno}: empty image_id")
            if image_id in seen:
                raise ValidationError(f"{path}:{lineno}: duplicate image_id {image_id!r}")
            seen.add(image_id)
            try:
                gt = int(row["gt_class_index"])
                tgt = int(row["target_class_index"])
            except ValueError:
                raise LoadError(f"{path}:{lineno}: non-integer class index") from None
            rows.append((image_id, gt, tgt))
    return rows


def _decode_png(path: Path, image_id: str) -> np.ndarray:
    if not path.exists():
        raise LoadError(f"record {image_id!r}: image file not found: {path}")
    with Image.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.uint8)
    if arr.shape[:2] != (IMAGE_SIDE, IMAGE_SIDE):
        raise ValidationError(
            f"record {image_id!r}: image is {arr.shape[1]}x{arr.shape[0]}, "
            f"expected {IMAGE_SIDE}x{IMAGE_SIDE}"
        )
    pixels = arr.astype(np.float32) / 255.0
    pixels.flags.writeable = False
    return pixels


def load_dataset(
    root_path: str | Path,
    count: int,
    vocabulary: LabelVocabulary | None = None,
) -> list[ImageRecord]:
    """Load the first ``count`` records in manifest order.

    Records are immutable and safe to share across concurrent attack workers.
    """
    if count < 1:
        raise RangeError(f"count must be >= 1, got {count}")
    root = Path(root_path)
    rows = read_manifest(root / "manifest.csv")
    if count > len(rows):
        raise RangeError(f"requested {count} records but manifest has {len(rows)}")
    vocab = vocabulary if vocabulary is not None else load_bundled_vocabulary()
    records = []
    for image_id, gt, tgt in rows[:count]:
        pixels = _decode_png(root / "images" / f"{image_id}.png", image_id)
        records.append(
            ImageRecord(
                id=image_id,
                pixels=pixels,
                gt_label=vocab.ref(gt),
                target_label=vocab.ref(tgt),
            )
        )
    return records


def unique_label_counts(records: list[ImageRecord]) -> tuple[int, int]:
    """Distinct ground-truth and target class counts over a record set."""
    if not records:
        raise RangeError("records must be non-empty")
    gt = {r.gt_label.class_index for r in records}
    tgt = {r.target_label.class_index for r in records}
    return len(gt), len(tgt)
