"""Target-classifier predictions: recorded dumps, a local surrogate, and a
fenced remote client.

The dump file replaces the paper-and-pencil screenshot workflow with a
machine-readable record: UTF-8 JSON lines, a metadata header line followed
by one prediction set per line.  The stored contract is at most 10
predictions per set, descending confidence, each at or above the dump's
confidence floor (0.5 unless the metadata says otherwise).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import torch

from .errors import DuplicateKeyError, LoadError, ValidationError
from .models import SourceModel, writable_f32

__all__ = [
    "Version",
    "Service",
    "Prediction",
    "PredictionSet",
    "TargetDump",
    "ingest_dump",
    "export_dump",
    "classify_surrogate",
    "RemoteClientConfig",
    "parse_remote_response",
    "submit_remote",
    "DEFAULT_MIN_CONFIDENCE",
    "MAX_PREDICTIONS",
]

MAX_PREDICTIONS = 10
DEFAULT_MIN_CONFIDENCE = 0.5

# surrogate defaults chosen to echo the coarse contrast between the two
# services: object localization returns few, confident detections
_SURROGATE_FLOORS = {"object_localization": 0.3, "label_detection": 0.0}
_SURROGATE_CAPS = {"object_localization": 5, "label_detection": MAX_PREDICTIONS}


class Version(str, Enum):
    ORI = "ori"
    CE = "ce"
    POTRIP = "potrip"
    LOGIT = "logit"


class Service(str, Enum):
    OBJECT_LOCALIZATION = "object_localization"
    LABEL_DETECTION = "label_detection"


@dataclass(frozen=True)
class Prediction:
    label: str
    confidence: float

    def __post_init__(self):
        if not self.label:
            raise ValidationError("prediction label must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class PredictionSet:
    image_id: str
    version: Version
    service: Service
    predictions: tuple[Prediction, ...]

    def __post_init__(self):
        if len(self.predictions) > MAX_PREDICTIONS:
            raise ValidationError(
                f"{self.key()}: {len(self.predictions)} predictions exceed the cap "
                f"of {MAX_PREDICTIONS}"
            )
        confs = [p.confidence for p in self.predictions]
        if any(a < b for a, b in zip(confs, confs[1:])):
            raise ValidationError(f"{self.key()}: confidences must be non-increasing")

    def key(self) -> tuple[str, str, str]:
        return (self.image_id, self.version.value, self.service.value)

    def labels(self) -> list[str]:
        return [p.label for p in self.predictions]


@dataclass
class TargetDump:
    sets: list[PredictionSet]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for s in self.sets:
            if s.key() in seen:
                raise DuplicateKeyError(f"duplicate prediction set for key {s.key()}")
            seen.add(s.key())

    def by_key(self) -> dict[tuple[str, str, str], PredictionSet]:
        return {s.key(): s for s in self.sets}

    def image_ids(self) -> list[str]:
        out, seen = [], set()
        for s in self.sets:
            if s.image_id not in seen:
                seen.add(s.image_id)
                out.append(s.image_id)
        return out


def _parse_prediction_set(
    obj: dict, lineno: int, min_confidence: float
) -> PredictionSet:
    def fail(fieldname: str, why: str):
        raise ValidationError(f"line {lineno}: field {fieldname!r}: {why}")

    for fieldname in ("image_id", "version", "service", "predictions"):
        if fieldname not in obj:
            fail(fieldname, "missing")
    try:
        version = Version(obj["version"])
    except ValueError:
        fail("version", f"unknown value {obj['version']!r}")
    try:
        service = Service(obj["service"])
    except ValueError:
        fail("service", f"unknown value {obj['service']!r}")
    preds = []
    for i, p in enumerate(obj["predictions"]):
        if "label" not in p or "confidence" not in p:
            fail(f"predictions[{i}]", "needs label and confidence")
        conf = float(p["confidence"])
        if conf < min_confidence:
            fail(
                f"predictions[{i}].confidence",
                f"{conf} below the dump floor {min_confidence} "
                f"(image_id={obj['image_id']!r})",
            )
        preds.append(Prediction(label=str(p["label"]), confidence=conf))
    try:
        return PredictionSet(
            image_id=str(obj["image_id"]),
            version=version,
            service=service,
            predictions=tuple(preds),
        )
    except ValidationError as exc:
        raise ValidationError(f"line {lineno}: {exc}") from None


def ingest_dump(path: str | Path) -> TargetDump:
    """Load and validate a prediction dump; duplicate keys are rejected."""
    path = Path(path)
    if not path.exists():
        raise LoadError(f"dump file not found: {path}")
    metadata: dict = {}
    sets: list[PredictionSet] = []
    seen: set[tuple[str, str, str]] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LoadError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            if lineno == 1 and obj.get("kind") == "metadata":
                metadata = obj
                continue
            pset = _parse_prediction_set(
                obj, lineno, float(metadata.get("min_confidence", DEFAULT_MIN_CONFIDENCE))
            )
            if pset.key() in seen:
                raise DuplicateKeyError(f"{path}:{lineno}: duplicate key {pset.key()}")
            seen.add(pset.key())
            sets.append(pset)
    return TargetDump(sets=sets, metadata=metadata)


def export_dump(dump: TargetDump, path: str | Path) -> None:
    path = Path(path)
    lines = []
    metadata = dict(dump.metadata)
    metadata.setdefault("kind", "metadata")
    lines.append(json.dumps(metadata, sort_keys=True))
    for s in dump.sets:
        lines.append(
            json.dumps(
                {
                    "image_id": s.image_id,
                    "version": s.version.value,
                    "service": s.service.value,
                    "predictions": [
                        {"label": p.label, "confidence": p.confidence}
                        for p in s.predictions
                    ],
                },
                sort_keys=True,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def classify_surrogate(
    model: SourceModel,
    image: np.ndarray,
    service: Service,
    image_id: str = "",
    version: Version = Version.ORI,
    class_names: list[str] | None = None,
    floor: float | None = None,
    max_results: int | None = None,
) -> PredictionSet:
    """Top-k softmax classes from a held-out local classifier.

    The model must not be a member of the attacking ensemble (the caller's
    responsibility; the surrogate stands in for the remote black box).
    Per-service defaults: label detection keeps up to 10 predictions with
    no floor, object localization at most 5 above 0.3.  Pass floor=0.5 for
    contract-faithful sets that an unmodified dump would accept.
    """
    if floor is None:
        floor = _SURROGATE_FLOORS[service.value]
    if max_results is None:
        max_results = _SURROGATE_CAPS[service.value]
    x = torch.from_numpy(writable_f32(image)).permute(2, 0, 1)
    with torch.no_grad():
        scores = torch.softmax(model.forward_t(x), dim=-1).numpy()
    order = np.argsort(-scores, kind="stable")[:max_results]
    preds = []
    for idx in order:
        score = float(scores[idx])
        if score < floor:
            break
        label = class_names[idx] if class_names else f"class_{idx}"
        preds.append(Prediction(label=label, confidence=score))
    return PredictionSet(
        image_id=image_id, version=version, service=service, predictions=tuple(preds)
    )


# ---------------------------------------------------------------------------
# remote client (disabled by default; never exercised in CI)

@dataclass(frozen=True)
class RemoteClientConfig:
    endpoint: str
    credentials_path: str
    requests_per_minute: int = 30
    enabled: bool = False
    max_retries: int = 3


def parse_remote_response(
    payload: dict, image_id: str, version: Version, service: Service
) -> PredictionSet:
    """Map a provider annotate-response into a PredictionSet.

    Truncates to 10 and drops entries below 0.5, matching the stored
    contract.
    """
    try:
        response = payload["responses"][0]
    except (KeyError, IndexError):
        raise ValidationError("malformed response: missing responses[0]") from None
    if service is Service.LABEL_DETECTION:
        raw = response.get("labelAnnotations", [])
        items = [(r.get("description", ""), float(r.get("score", 0.0))) for r in raw]
    else:
        raw = response.get("localizedObjectAnnotations", [])
        items = [(r.get("name", ""), float(r.get("score", 0.0))) for r in raw]
    items = [(label, score) for label, score in items if score >= DEFAULT_MIN_CONFIDENCE]
    items.sort(key=lambda t: -t[1])
    preds = tuple(Prediction(label=l, confidence=s) for l, s in items[:MAX_PREDICTIONS])
    return PredictionSet(image_id=image_id, version=version, service=service, predictions=preds)


def submit_remote(
    config: RemoteClientConfig,
    image_path: str | Path,
    service: Service,
    image_id: str,
    version: Version,
) -> PredictionSet:
    """Submit one image file to the remote service.  Requires enabled=True
    plus a readable credentials file; retries transport failures with
    exponential backoff up to the configured budget.
    """
    if not config.enabled:
        raise ValidationError(
            "remote client is disabled; pass enabled=True and credentials to use it"
        )
    creds = Path(config.credentials_path)
    if not creds.exists():
        raise LoadError(f"credentials file not found: {creds}")
    import base64

    import requests

    content = base64.b64encode(Path(image_path).read_bytes()).decode("ascii")
    feature = (
        "LABEL_DETECTION" if service is Service.LABEL_DETECTION else "OBJECT_LOCALIZATION"
    )
    body = {
        "requests": [
            {
                "image": {"content": content},
                "features": [{"type": feature, "maxResults": MAX_PREDICTIONS}],
            }
        ]
    }
    delay = 60.0 / max(config.requests_per_minute, 1)
    last_exc: Exception | None = None
    for attempt in range(config.max_retries):
        try:
            resp = requests.post(
                config.endpoint,
                json=body,
                headers={"Authorization": f"Bearer {creds.read_text().strip()}"},
                timeout=30,
            )
            resp.raise_for_status()
            return parse_remote_response(resp.json(), image_id, version, service)
        except (requests.ConnectionError, requests.Timeout, requests.HTTPError) as exc:
            last_exc = exc
            time.sleep(delay * (2**attempt))
    raise LoadError(f"remote request failed after {config.max_retries} attempts: {last_exc}")
