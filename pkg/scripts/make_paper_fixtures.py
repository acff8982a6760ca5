#!/usr/bin/env python3
"""Regenerate the bundled replay fixtures under fixtures/.

The fixtures mirror the published experiment's shape: 400 images x 4
versions x 2 services of prediction sets, plus one human judgment per
(image, version, service, mode) key.  Success counts, per-image prediction
means, and unique-prediction counts are constructed to match the reported
tables exactly; everything else (label names, which images succeed,
confidences) is deterministic synthetic filler.
"""

from __future__ import annotations

import json
import sys
from collections import Counter
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from advsem.taxonomy import normalize_label  # noqa: E402

FIXTURES = REPO / "fixtures"

N_IMAGES = 400
IDS = [f"img_{i:04d}" for i in range(1, N_IMAGES + 1)]

# success counts per (service, mode, version) = rate% * 400 / 100
SUCCESS_COUNTS = {
    ("object_localization", "non_targeted"): {"ori": 126, "ce": 212, "potrip": 207, "logit": 250},
    ("object_localization", "targeted"): {"ori": 0, "ce": 36, "potrip": 34, "logit": 77},
    ("label_detection", "non_targeted"): {"ori": 39, "ce": 136, "potrip": 90, "logit": 140},
    ("label_detection", "targeted"): {"ori": 0, "ce": 18, "potrip": 9, "logit": 25},
}

# total predictions per version = mean * 400
TOTALS = {
    "object_localization": {"ori": 1032, "ce": 1168, "potrip": 1072, "logit": 1348},
    "label_detection": {"ori": 3992, "ce": 3940, "potrip": 3932, "logit": 3944},
}

# unique labels per version and across all versions
UNIQUES = {
    "object_localization": {"all": 192, "ori": 161, "ce": 82, "potrip": 98, "logit": 83},
    "label_detection": {"all": 1333, "ori": 1162, "ce": 730, "potrip": 771, "logit": 1008},
}

VERSIONS = ["ori", "ce", "potrip", "logit"]

# Heads of the frequency distributions, echoing the reported shift: people
# dominate original object detections, animals the adversarial ones; labels
# drift towards art and vegetation.
OBJECT_HEAD = [
    "Person", "Clothing", "Shoe", "Chair", "Car", "Building", "Tree", "Table",
    "Dog", "Cat", "Bird", "Animal", "Snake", "Insect", "Flower", "Plant",
]
LABEL_HEAD = [
    "Sky", "Cloud", "Person", "Water", "Tree", "Building", "Window", "Food",
    "Art", "Painting", "Plant", "Grass", "Pattern", "Illustration", "Drawing",
    "Visual arts",
]

# extra-copy shares for the head labels of each slice (person-heavy for
# originals, animal/art-heavy for adversarials)
ORI_BIAS = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
ADV_BIAS_OBJECT = [8, 9, 10, 11, 12, 13, 14, 15, 6, 5]
ADV_BIAS_LABEL = [8, 9, 10, 11, 12, 13, 14, 15, 4, 0]
SHARES = [0.30, 0.18, 0.13, 0.09, 0.07, 0.06, 0.05, 0.04, 0.03, 0.03]

_ADJ = [
    "amber", "ashen", "braided", "bright", "carved", "coastal", "copper",
    "crimson", "dappled", "dusty", "faded", "frosted", "gilded", "glazed",
    "hollow", "ivory", "jagged", "knotted", "lacquered", "marbled", "mossy",
    "muted", "olive", "pale", "polished", "ragged", "rustic", "sable",
    "scarlet", "slate", "smoky", "speckled", "striped", "tangled", "tawny",
    "umber", "velvet", "washed", "woven", "zesty",
]
_NOUN = [
    "arbor", "basin", "beacon", "bellows", "bramble", "canopy", "cistern",
    "cornice", "crag", "dune", "ember", "fathom", "gable", "garland", "grove",
    "harbor", "hearth", "inlet", "keystone", "knoll", "lantern", "ledge",
    "meadow", "mill", "orchard", "parapet", "quarry", "ravine", "ridge",
    "shoal", "spire", "terrace", "thicket", "trellis", "vane", "verge",
    "wharf", "willow", "yard", "zenith",
]


def filler_names(prefix_head: list[str], total: int) -> list[str]:
    """``total`` distinct display labels, the head list first."""
    names = list(prefix_head)
    combos = [f"{a} {n}" for a in _ADJ for n in _NOUN]
    for combo in combos:
        if len(names) >= total:
            break
        names.append(combo.capitalize())
    assert len(names) == total, (len(names), total)
    canon = [normalize_label(n) for n in names]
    assert len(set(canon)) == total, "label pool must be canonically distinct"
    return names


def version_label_indices(service: str) -> dict[str, list[int]]:
    """Index subsets of the service pool with the required unique counts and
    a union covering the whole pool."""
    u = UNIQUES[service]
    if service == "object_localization":
        subsets = {
            "ori": list(range(0, 161)),
            "ce": list(range(161, 192)) + list(range(0, 51)),
            "potrip": list(range(8, 16)) + list(range(58, 148)),
            "logit": list(range(2, 85)),
        }
    else:
        subsets = {
            "ori": list(range(0, 1162)),
            "ce": list(range(1162, 1333)) + list(range(0, 559)),
            "potrip": list(range(8, 16)) + list(range(400, 1163)),
            "logit": list(range(2, 1010)),
        }
    for version in VERSIONS:
        assert len(subsets[version]) == u[version], (service, version, len(subsets[version]))
        assert len(set(subsets[version])) == u[version]
    union = set().union(*subsets.values())
    assert union == set(range(u["all"])), (service, len(union))
    return subsets


def set_lengths(service: str, version: str, rng: np.random.Generator) -> list[int]:
    """Per-set prediction counts summing to the required total."""
    total = TOTALS[service][version]
    if service == "object_localization":
        if total > 3 * N_IMAGES:
            lengths = [3] * N_IMAGES
            bumped = rng.permutation(N_IMAGES)[: total - 3 * N_IMAGES]
        else:
            lengths = [2] * N_IMAGES
            bumped = rng.permutation(N_IMAGES)[: total - 2 * N_IMAGES]
    else:
        lengths = [9] * N_IMAGES
        bumped = rng.permutation(N_IMAGES)[: total - 9 * N_IMAGES]
    for i in bumped:
        lengths[i] += 1
    assert sum(lengths) == total
    return lengths


def allocate_counts(subset: list[int], total: int, bias: list[int]) -> Counter:
    """One copy of every subset label plus capped, share-weighted extras on
    the bias labels; every count stays <= N_IMAGES so a label never needs to
    appear twice in one image's set."""
    counts: Counter[int] = Counter({i: 1 for i in subset})
    extras = total - len(subset)
    assert extras >= 0
    in_subset = set(subset)
    bias = [b for b in bias if b in in_subset] or list(subset[:10])
    cap = N_IMAGES
    for rank, label in enumerate(bias):
        share = int(extras * SHARES[rank % len(SHARES)])
        take = min(share, cap - counts[label])
        counts[label] += take
    leftover = total - sum(counts.values())
    pool = bias + [i for i in subset if i not in set(bias)]
    cursor = 0
    while leftover > 0:
        label = pool[cursor % len(pool)]
        if counts[label] < cap:
            counts[label] += 1
            leftover -= 1
        cursor += 1
    assert sum(counts.values()) == total
    assert max(counts.values()) <= cap
    return counts


def fill_sets(
    pool: list[str],
    counts: Counter,
    lengths: list[int],
    rng: np.random.Generator,
) -> list[list[str]]:
    """Chunk the label multiset into per-set lists with no internal repeats,
    drawing from the largest remaining piles first."""
    remaining = Counter(counts)
    sets: list[list[str]] = []
    for si, length in enumerate(lengths):
        if length > len(remaining):
            raise AssertionError(f"set {si}: only {len(remaining)} distinct labels left")
        chosen = sorted(remaining.items(), key=lambda kv: (-kv[1], kv[0]))[:length]
        labels = []
        for idx, _ in chosen:
            remaining[idx] -= 1
            if remaining[idx] == 0:
                del remaining[idx]
            labels.append(pool[idx])
        rng.shuffle(labels)
        sets.append(labels)
    assert not remaining, f"{sum(remaining.values())} labels left over"
    return sets


def confidences(n: int, rng: np.random.Generator) -> list[float]:
    confs = []
    value = 0.99 - rng.random() * 0.02
    for _ in range(n):
        confs.append(round(max(value, 0.5), 2))
        value -= 0.01 + rng.random() * 0.03
    for i in range(1, n):
        confs[i] = min(confs[i], confs[i - 1])
    return confs


def build_dump() -> list[dict]:
    records = []
    for service in ("object_localization", "label_detection"):
        u = UNIQUES[service]
        head = OBJECT_HEAD if service == "object_localization" else LABEL_HEAD
        pool = filler_names(head, u["all"])
        subsets = version_label_indices(service)
        for version in VERSIONS:
            rng = np.random.default_rng([ord(c) for c in f"{service}/{version}"])
            lengths = set_lengths(service, version, rng)
            if version == "ori":
                bias = ORI_BIAS
            elif service == "object_localization":
                bias = ADV_BIAS_OBJECT
            else:
                bias = ADV_BIAS_LABEL
            counts = allocate_counts(subsets[version], TOTALS[service][version], bias)
            label_sets = fill_sets(pool, counts, lengths, rng)
            for image_id, labels in zip(IDS, label_sets):
                confs = confidences(len(labels), rng)
                records.append(
                    {
                        "image_id": image_id,
                        "version": version,
                        "service": service,
                        "predictions": [
                            {"label": label, "confidence": conf}
                            for label, conf in zip(labels, confs)
                        ],
                    }
                )
    return records


def build_judgments(dump_records: list[dict]) -> list[dict]:
    by_key = {(r["image_id"], r["version"], r["service"]): r for r in dump_records}
    judgments = []
    minute = 0
    for (service, mode), per_version in SUCCESS_COUNTS.items():
        for version, successes in per_version.items():
            rng = np.random.default_rng([ord(c) for c in f"{service}/{mode}/{version}"])
            winners = set(rng.choice(N_IMAGES, size=successes, replace=False).tolist())
            for i, image_id in enumerate(IDS):
                preds = by_key[(image_id, version, service)]["predictions"]
                verdict = i in winners
                needs_related = verdict if mode == "targeted" else not verdict
                marks = [
                    {"label": p["label"], "related": bool(needs_related and j == 0)}
                    for j, p in enumerate(preds)
                ]
                judgments.append(
                    {
                        "image_id": image_id,
                        "version": version,
                        "service": service,
                        "mode": mode,
                        "verdict": verdict,
                        "origin": "human",
                        "per_prediction": marks,
                        "judge_id": "judge_1",
                        "note": "",
                        "timestamp": f"2022-05-{10 + minute // 1440:02d}"
                        f"T{(minute // 60) % 24:02d}:{minute % 60:02d}:00+00:00",
                    }
                )
                minute += 1
    return judgments


def build_manifest() -> list[tuple[str, int, int]]:
    rows = []
    for i, image_id in enumerate(IDS, start=1):
        gt = (i - 1) if i <= 266 else (i * 7) % 266
        target = 400 + ((i * 3) % 310) if i <= 310 else 400 + ((i * 13) % 310)
        rows.append((image_id, gt, target))
    assert len({gt for _, gt, _ in rows}) == 266
    assert len({t for _, _, t in rows}) == 310
    assert all(gt != t for _, gt, t in rows)
    return rows


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    dump_records = build_dump()
    assert len(dump_records) == 3200

    # verify the table statistics before writing anything
    for service in ("object_localization", "label_detection"):
        for version in VERSIONS:
            sets = [
                r for r in dump_records if r["service"] == service and r["version"] == version
            ]
            total = sum(len(r["predictions"]) for r in sets)
            assert total == TOTALS[service][version], (service, version, total)
            uniq = {
                normalize_label(p["label"]) for r in sets for p in r["predictions"]
            }
            assert len(uniq) == UNIQUES[service][version], (service, version, len(uniq))
        all_uniq = {
            normalize_label(p["label"])
            for r in dump_records
            if r["service"] == service
            for p in r["predictions"]
        }
        assert len(all_uniq) == UNIQUES[service]["all"]

    dump_path = FIXTURES / "paper_dump.jsonl"
    with dump_path.open("w", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {
                    "kind": "metadata",
                    "source": "replay fixture shaped like the published capture",
                    "capture_date": "2022-05-10",
                    "min_confidence": 0.5,
                },
                sort_keys=True,
            )
            + "\n"
        )
        for rec in dump_records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")

    judgments = build_judgments(dump_records)
    assert len(judgments) == 6400
    judg_path = FIXTURES / "paper_judgments.jsonl"
    with judg_path.open("w", encoding="utf-8") as fh:
        for j in judgments:
            fh.write(json.dumps(j, sort_keys=True) + "\n")

    manifest = build_manifest()
    man_path = FIXTURES / "paper_manifest.csv"
    with man_path.open("w", encoding="utf-8") as fh:
        fh.write("image_id,gt_class_index,target_class_index\n")
        for image_id, gt, target in manifest:
            fh.write(f"{image_id},{gt},{target}\n")

    print(f"wrote {dump_path}, {judg_path}, {man_path}")


if __name__ == "__main__":
    main()
