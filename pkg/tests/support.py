"""Shared helpers for the test suite."""

from pathlib import Path

import numpy as np
import scipy.ndimage as ndi

from advsem.dataset import ImageRecord, LabelRef

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def smooth_image(seed: int, side: int = 299) -> np.ndarray:
    """Low-frequency random image, a stand-in for a natural photo."""
    rng = np.random.default_rng(seed)
    base = rng.random((32, 32, 3)).astype(np.float32)
    img = np.stack(
        [ndi.zoom(base[:, :, c], side / 32, order=1)[:side, :side] for c in range(3)],
        axis=-1,
    )
    return np.clip(img, 0.0, 1.0).astype(np.float32)


def make_record(i: int, num_classes: int = 10, seed: int | None = None) -> ImageRecord:
    rng = np.random.default_rng(1000 + i if seed is None else seed)
    gt = int(rng.integers(0, num_classes))
    tgt = int(rng.integers(0, num_classes))
    while tgt == gt:
        tgt = int(rng.integers(0, num_classes))
    return ImageRecord(
        id=f"rec_{i:03d}",
        pixels=smooth_image(7000 + i),
        gt_label=LabelRef(gt, f"class_{gt}"),
        target_label=LabelRef(tgt, f"class_{tgt}"),
    )
