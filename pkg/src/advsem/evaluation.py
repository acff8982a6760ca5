"""Success verdicts under the semantic-mismatch criterion.

A non-targeted attack succeeds when no stored prediction is related to the
ground truth; a targeted attack succeeds when at least one prediction is
related to the target label.  Automatic verdicts come from the taxonomy;
human judgments, recorded per prediction, override them per key.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import CoverageError, LoadError, RangeError, ValidationError
from .target import PredictionSet, Service, TargetDump, Version
from .taxonomy import (
    RelatednessPolicy,
    Taxonomy,
    normalize_label,
    semantically_related,
)

__all__ = [
    "Mode",
    "Origin",
    "Judgment",
    "JudgmentStore",
    "auto_judge",
    "record_human_judgment",
    "success_rate",
    "success_rate_table",
    "judgment_keys_for_dump",
    "import_binary_judgments",
]

AUTO_TIMESTAMP = "1970-01-01T00:00:00+00:00"


class Mode(str, Enum):
    TARGETED = "targeted"
    NON_TARGETED = "non_targeted"


class Origin(str, Enum):
    AUTOMATIC = "automatic"
    HUMAN = "human"


Key = tuple[str, str, str, str]  # (image_id, version, service, mode)


@dataclass(frozen=True)
class Judgment:
    image_id: str
    version: Version
    service: Service
    mode: Mode
    verdict: bool  # True = success for the attacker
    origin: Origin
    per_prediction: tuple[tuple[str, bool], ...] = ()
    judge_id: str = ""
    note: str = ""
    timestamp: str = AUTO_TIMESTAMP

    def __post_init__(self):
        any_related = any(rel for _, rel in self.per_prediction)
        if self.mode is Mode.NON_TARGETED:
            expected = not any_related
        else:
            expected = any_related
        if self.verdict != expected:
            raise ValidationError(
                f"{self.key()}: verdict {self.verdict} inconsistent with "
                f"per-prediction marks (mode={self.mode.value})"
            )
        if self.origin is Origin.HUMAN and not self.judge_id:
            raise ValidationError(f"{self.key()}: human judgment needs a judge_id")
        if self.origin is Origin.AUTOMATIC and self.judge_id:
            raise ValidationError(f"{self.key()}: automatic judgment has a judge_id")

    def key(self) -> Key:
        return (self.image_id, self.version.value, self.service.value, self.mode.value)

    def to_json_obj(self) -> dict:
        return {
            "image_id": self.image_id,
            "version": self.version.value,
            "service": self.service.value,
            "mode": self.mode.value,
            "verdict": self.verdict,
            "origin": self.origin.value,
            "per_prediction": [
                {"label": label, "related": rel} for label, rel in self.per_prediction
            ],
            "judge_id": self.judge_id,
            "note": self.note,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Judgment":
        return cls(
            image_id=str(obj["image_id"]),
            version=Version(obj["version"]),
            service=Service(obj["service"]),
            mode=Mode(obj["mode"]),
            verdict=bool(obj["verdict"]),
            origin=Origin(obj["origin"]),
            per_prediction=tuple(
                (str(p["label"]), bool(p["related"])) for p in obj.get("per_prediction", [])
            ),
            judge_id=str(obj.get("judge_id", "")),
            note=str(obj.get("note", "")),
            timestamp=str(obj.get("timestamp", AUTO_TIMESTAMP)),
        )


def auto_judge(
    pset: PredictionSet,
    gt_label: str,
    target_label: str,
    mode: Mode,
    taxonomy: Taxonomy,
    policy: RelatednessPolicy | None = None,
) -> Judgment:
    """Judge one prediction set automatically against the taxonomy.

    An empty prediction list is a vacuous non-targeted success and a
    targeted failure.  Unknown predicted labels never fail the run; they
    are flagged in the note for later human adjudication.
    """
    policy = policy if policy is not None else RelatednessPolicy()
    reference = target_label if mode is Mode.TARGETED else gt_label
    reference_canon = normalize_label(reference)
    marks: list[tuple[str, bool]] = []
    unknown: list[str] = []
    for pred in pset.predictions:
        verdict = semantically_related(
            taxonomy, policy, reference_canon, normalize_label(pred.label)
        )
        marks.append((pred.label, verdict.related))
        unknown.extend(verdict.unknown_labels)
    any_related = any(rel for _, rel in marks)
    verdict_value = any_related if mode is Mode.TARGETED else not any_related
    note = ""
    if unknown:
        note = "unknown labels: " + ", ".join(sorted(set(unknown)))
    return Judgment(
        image_id=pset.image_id,
        version=pset.version,
        service=pset.service,
        mode=mode,
        verdict=verdict_value,
        origin=Origin.AUTOMATIC,
        per_prediction=tuple(marks),
        note=note,
    )


class JudgmentStore:
    """Append-only judgment log with an in-memory key index.

    The latest human judgment for a key overrides any automatic ones;
    among judgments of equal standing the newest timestamp (then append
    order) wins.  When backed by a file, appends rewrite the log to a
    temporary file and rename it into place, so readers always see a
    consistent prefix; one writer, many readers.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._log: list[Judgment] = []
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        assert self.path is not None
        with self.path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise LoadError(f"{self.path}:{lineno}: invalid JSON: {exc}") from None
                try:
                    self._log.append(Judgment.from_json_obj(obj))
                except (KeyError, ValueError) as exc:
                    raise LoadError(f"{self.path}:{lineno}: bad judgment: {exc}") from None

    def _flush(self) -> None:
        if self.path is None:
            return
        payload = "".join(json.dumps(j.to_json_obj(), sort_keys=True) + "\n" for j in self._log)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".judgments-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(payload)
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def append(self, judgment: Judgment) -> None:
        self._log.append(judgment)
        self._flush()

    def extend(self, judgments) -> None:
        self._log.extend(judgments)
        self._flush()

    def all_judgments(self) -> list[Judgment]:
        return list(self._log)

    def effective(self, key: Key) -> Judgment | None:
        """The authoritative judgment for a key, or None."""
        best: Judgment | None = None
        best_rank: tuple | None = None
        for seq, j in enumerate(self._log):
            if j.key() != key:
                continue
            rank = (j.origin is Origin.HUMAN, j.timestamp, seq)
            if best_rank is None or rank > best_rank:
                best, best_rank = j, rank
        return best

    def effective_by_key(self) -> dict[Key, Judgment]:
        out: dict[Key, tuple] = {}
        best: dict[Key, Judgment] = {}
        for seq, j in enumerate(self._log):
            rank = (j.origin is Origin.HUMAN, j.timestamp, seq)
            key = j.key()
            if key not in out or rank > out[key]:
                out[key] = rank
                best[key] = j
        return best

    def human_keys(self) -> set[Key]:
        return {j.key() for j in self._log if j.origin is Origin.HUMAN}

    def __len__(self) -> int:
        return len(self._log)


def record_human_judgment(store: JudgmentStore, judgment: Judgment) -> JudgmentStore:
    """Append a human judgment; it becomes authoritative for its key."""
    if judgment.origin is not Origin.HUMAN:
        raise ValidationError("record_human_judgment requires origin=human")
    store.append(judgment)  # consistency already enforced by the type
    return store


def success_rate(
    store: JudgmentStore,
    image_ids: list[str],
    version: Version,
    service: Service,
    mode: Mode,
) -> float:
    """100 * successes / len(image_ids), to two decimals.

    Every requested key must have a judgment; partial coverage raises
    rather than silently excluding images.
    """
    if not image_ids:
        raise RangeError("image_ids must be non-empty")
    effective = store.effective_by_key()
    missing = []
    successes = 0
    for image_id in image_ids:
        key = (image_id, version.value, service.value, mode.value)
        j = effective.get(key)
        if j is None:
            missing.append(key)
        elif j.verdict:
            successes += 1
    if missing:
        raise CoverageError(missing)
    return round(100.0 * successes / len(image_ids), 2)


def success_rate_rows(
    store: JudgmentStore,
    image_ids: list[str],
    slices: list[tuple[Version, Service]],
) -> list[dict]:
    """Success rates for the given (version, service) slices, both modes."""
    rows = []
    for mode in Mode:
        for version, service in slices:
            rows.append(
                {
                    "version": version.value,
                    "service": service.value,
                    "mode": mode.value,
                    "success_rate": success_rate(store, image_ids, version, service, mode),
                }
            )
    return rows


def success_rate_table(store: JudgmentStore, image_ids: list[str]) -> list[dict]:
    """All (version, service, mode) success rates, Table-1 style."""
    slices = [(version, service) for service in Service for version in Version]
    rows = success_rate_rows(store, image_ids, slices)
    rows.sort(
        key=lambda r: (
            list(Service).index(Service(r["service"])),
            list(Mode).index(Mode(r["mode"])),
            list(Version).index(Version(r["version"])),
        )
    )
    return rows


def judgment_keys_for_dump(dump: TargetDump) -> list[Key]:
    """Every (image_id, version, service, mode) key a full evaluation covers."""
    keys = []
    for s in dump.sets:
        for mode in Mode:
            keys.append((s.image_id, s.version.value, s.service.value, mode.value))
    return keys


def import_binary_judgments(path: str | Path, dump: TargetDump) -> list[Judgment]:
    """Shim for coarse published judgment files.

    Input lines carry image_id, version, service, mode, verdict and
    optionally judge_id/timestamp.  Marks are reconstructed on the decisive
    prediction: a verdict that requires a related prediction marks the
    first stored prediction, all others stay unrelated.
    """
    path = Path(path)
    if not path.exists():
        raise LoadError(f"judgment import file not found: {path}")
    by_key = dump.by_key()
    out: list[Judgment] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            version = Version(obj["version"])
            service = Service(obj["service"])
            mode = Mode(obj["mode"])
            verdict = bool(obj["verdict"])
            pset = by_key.get((str(obj["image_id"]), version.value, service.value))
            if pset is None:
                raise ValidationError(
                    f"{path}:{lineno}: no prediction set for {obj['image_id']!r}"
                )
            needs_related = verdict if mode is Mode.TARGETED else not verdict
            labels = pset.labels()
            if needs_related and not labels:
                raise ValidationError(
                    f"{path}:{lineno}: verdict requires a related prediction "
                    "but the set is empty"
                )
            marks = tuple(
                (label, needs_related and i == 0) for i, label in enumerate(labels)
            )
            out.append(
                Judgment(
                    image_id=str(obj["image_id"]),
                    version=version,
                    service=service,
                    mode=mode,
                    verdict=verdict,
                    origin=Origin.HUMAN,
                    per_prediction=marks,
                    judge_id=str(obj.get("judge_id", "imported")),
                    note=str(obj.get("note", "")),
                    timestamp=str(obj.get("timestamp", AUTO_TIMESTAMP)),
                )
            )
    return out
