"""Prediction-pattern statistics: quantity, diversity, and the frequency
shift between original and adversarial images.

Labels are canonicalized before counting so case and spacing variants
collapse.  Emission is CSV plus a plot-data JSON; rendering lives in
:mod:`advsem.figures`.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import RangeError, ValidationError
from .target import PredictionSet, Service, TargetDump, Version
from .taxonomy import normalize_label

__all__ = [
    "FrequencyTable",
    "build_frequency_table",
    "predictions_per_image",
    "unique_prediction_count",
    "top_k_frequent",
    "ShiftRow",
    "shift_report",
    "slice_dump",
    "write_table1_csv",
    "write_table2_quantity_csv",
    "write_table2_diversity_csv",
    "write_fig3_json",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class FrequencyTable:
    entries: dict  # canonical label -> occurrence count (all >= 1)
    total_sets: int


def build_frequency_table(sets: list[PredictionSet]) -> FrequencyTable:
    counts: dict[str, int] = {}
    for s in sets:
        for label in s.labels():
            canon = normalize_label(label)
            counts[canon] = counts.get(canon, 0) + 1
    return FrequencyTable(entries=counts, total_sets=len(sets))


def _require_nonempty(sets: list[PredictionSet]) -> None:
    if not sets:
        raise RangeError("prediction sets must be non-empty")


def predictions_per_image(sets: list[PredictionSet]) -> float:
    """Mean prediction-list length over a homogeneous (version, service) slice."""
    _require_nonempty(sets)
    slices = {(s.version, s.service) for s in sets}
    if len(slices) != 1:
        raise ValidationError(f"sets mix versions/services: {sorted(str(t) for t in slices)}")
    return round(sum(len(s.predictions) for s in sets) / len(sets), 2)


def unique_prediction_count(sets: list[PredictionSet]) -> int:
    """Distinct canonical labels across all sets."""
    _require_nonempty(sets)
    labels = {normalize_label(label) for s in sets for label in s.labels()}
    return len(labels)


def top_k_frequent(table: FrequencyTable, k: int) -> list[tuple[str, int]]:
    """The k highest-count labels, ties broken lexicographically."""
    if k < 1:
        raise RangeError("k must be >= 1")
    ordered = sorted(table.entries.items(), key=lambda item: (-item[1], item[0]))
    return ordered[:k]


@dataclass(frozen=True)
class ShiftRow:
    label: str
    ori_count: int
    adv_count: int
    in_ori_topk: bool
    in_adv_topk: bool


def shift_report(
    ori_sets: list[PredictionSet], adv_sets: list[PredictionSet], k: int
) -> list[ShiftRow]:
    """Counts for the union of both top-k lists: the data behind the
    original-vs-adversarial frequency overlay."""
    _require_nonempty(ori_sets)
    _require_nonempty(adv_sets)
    ori_table = build_frequency_table(ori_sets)
    adv_table = build_frequency_table(adv_sets)
    ori_top = [label for label, _ in top_k_frequent(ori_table, k)]
    adv_top = [label for label, _ in top_k_frequent(adv_table, k)]
    rows = []
    for label in ori_top + [l for l in adv_top if l not in ori_top]:
        rows.append(
            ShiftRow(
                label=label,
                ori_count=ori_table.entries.get(label, 0),
                adv_count=adv_table.entries.get(label, 0),
                in_ori_topk=label in ori_top,
                in_adv_topk=label in adv_top,
            )
        )
    return rows


def slice_dump(dump: TargetDump, version: Version, service: Service) -> list[PredictionSet]:
    return [s for s in dump.sets if s.version is version and s.service is service]


# ---------------------------------------------------------------------------
# report files

def write_table1_csv(rows: list[dict], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["version", "service", "mode", "success_rate"])
        for row in rows:
            writer.writerow(
                [row["version"], row["service"], row["mode"], f"{row['success_rate']:.2f}"]
            )


def write_table2_quantity_csv(dump: TargetDump, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["service", "ori", "ce", "potrip", "logit"])
        for service in Service:
            row = [service.value]
            for version in Version:
                row.append(f"{predictions_per_image(slice_dump(dump, version, service)):.2f}")
            writer.writerow(row)


def write_table2_diversity_csv(dump: TargetDump, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["service", "all", "ori", "ce", "potrip", "logit"])
        for service in Service:
            all_sets = [s for s in dump.sets if s.service is service]
            row = [service.value, str(unique_prediction_count(all_sets))]
            for version in Version:
                row.append(str(unique_prediction_count(slice_dump(dump, version, service))))
            writer.writerow(row)


def write_fig3_json(
    dump: TargetDump,
    service: Service,
    path: str | Path,
    adv_version: Version = Version.LOGIT,
    k: int = 10,
) -> None:
    rows = shift_report(
        slice_dump(dump, Version.ORI, service), slice_dump(dump, adv_version, service), k
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "service": service.value,
        "adv_version": adv_version.value,
        "top_k": k,
        "rows": [
            {
                "label": r.label,
                "ori_count": r.ori_count,
                "adv_count": r.adv_count,
                "in_ori_topk": r.in_ori_topk,
                "in_adv_topk": r.in_adv_topk,
            }
            for r in rows
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
