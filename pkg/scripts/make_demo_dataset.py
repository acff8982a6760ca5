#!/usr/bin/env python3
"""Create a small synthetic dataset for desk-scale runs.

Writes <out>/manifest.csv and <out>/images/<id>.png: smooth random 299x299
images with gt/target class indices drawn from a configurable vocabulary
size (use 10 to match the tiny test models, 1000 for the real pipeline).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import scipy.ndimage as ndi
from PIL import Image

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))


def smooth_image(rng: np.random.Generator, side: int = 299) -> np.ndarray:
    base = rng.random((32, 32, 3)).astype(np.float32)
    img = np.stack(
        [ndi.zoom(base[:, :, c], side / 32, order=1)[:side, :side] for c in range(3)],
        axis=-1,
    )
    return np.clip(img, 0.0, 1.0)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="dataset root to create")
    parser.add_argument("--count", type=int, default=5)
    parser.add_argument("--classes", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    root = Path(args.out)
    (root / "images").mkdir(parents=True, exist_ok=True)
    with open(root / "manifest.csv", "w", encoding="utf-8") as fh:
        fh.write("image_id,gt_class_index,target_class_index\n")
        for i in range(args.count):
            gt = int(rng.integers(0, args.classes))
            target = int(rng.integers(0, args.classes))
            while target == gt:
                target = int(rng.integers(0, args.classes))
            image_id = f"demo_{i:03d}"
            fh.write(f"{image_id},{gt},{target}\n")
            arr = (smooth_image(rng) * 255).astype(np.uint8)
            Image.fromarray(arr, mode="RGB").save(root / "images" / f"{image_id}.png")
    print(f"wrote {args.count} records under {root}")


if __name__ == "__main__":
    main()
