"""Detector and semantic-visibility clients.

Each client has two interchangeable backends: a JSON-over-HTTP remote
backend and a deterministic mock driven by a scene's ground-truth sidecar.
Setting ``ANCHORFRAME_OFFLINE=1`` forces the mocks regardless of any other
configuration.

Wire protocols (UTF-8 JSON, numbers as decimal floats):

* detector: ``POST <base_url>/detect`` with
  ``{"image_ppm_b64": <base64 of the netpbm-encoded frame>, "prompt": str}``
  answered by ``{"boxes": [{"x1":f,"y1":f,"x2":f,"y2":f,"score":f}, ...]}``
* evaluator: ``POST <base_url>/score`` with
  ``{"image_ppm_b64": ..., "attribute": str, "question": str}`` answered by
  ``{"score": f}``.

Frames travel as base64 netpbm so both ends stay codec-free and bit-exact.
"""

from __future__ import annotations

import base64
import json
import logging
import os
import urllib.error
import urllib.request
from dataclasses import dataclass
from importlib import resources
from typing import Protocol

import numpy as np

from .errors import ConfigError, InvalidGeometryError, ProtocolError, ServiceUnavailableError
from .geometry import BoundingBox, box_area, intersection_area
from .image_io import Frame, write_netpbm
from .synth import GroundTruth

logger = logging.getLogger(__name__)

OFFLINE_ENV = "ANCHORFRAME_OFFLINE"


@dataclass(frozen=True)
class Detection:
    """One detector hit: a valid box and its text-alignment confidence."""

    box: BoundingBox
    s_text: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.s_text <= 1.0:
            raise ValueError(f"s_text must lie in [0, 1], got {self.s_text}")


@dataclass(frozen=True)
class ServiceEndpoint:
    base_url: str
    timeout_ms: int = 10000
    max_retries: int = 2
    max_in_flight: int = 4

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ConfigError(f"timeout_ms must be positive, got {self.timeout_ms}")
        if self.max_retries < 0:
            raise ConfigError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.max_in_flight < 1:
            raise ConfigError(f"max_in_flight must be >= 1, got {self.max_in_flight}")


class Detector(Protocol):
    def detect_boxes(self, frame: Frame, object_prompt: str, *,
                     frame_index: int | None = None) -> list[Detection]: ...


class Vlm(Protocol):
    def attribute_visibility(self, crop: Frame, attribute: str, *,
                             frame_index: int | None = None,
                             crop_box: BoundingBox | None = None) -> float: ...


def offline_forced() -> bool:
    return os.environ.get(OFFLINE_ENV, "") == "1"


def _post_json(endpoint: ServiceEndpoint, path: str, payload: dict) -> dict:
    """POST with bounded retries; transport failures retry, malformed
    responses do not (they are protocol errors, not availability ones)."""
    url = endpoint.base_url.rstrip("/") + path
    body = json.dumps(payload).encode("utf-8")
    attempts = endpoint.max_retries + 1
    last_error: Exception | None = None
    for _ in range(attempts):
        request = urllib.request.Request(
            url, data=body, headers={"Content-Type": "application/json"}, method="POST"
        )
        try:
            with urllib.request.urlopen(request, timeout=endpoint.timeout_ms / 1000.0) as resp:
                raw = resp.read()
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            last_error = exc
            continue
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ProtocolError(f"{url}: response is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ProtocolError(f"{url}: expected a JSON object, got {type(doc).__name__}")
        return doc
    raise ServiceUnavailableError(f"{url}: no response after {attempts} attempts: {last_error}")


def _clamped_score(value: object, what: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ProtocolError(f"{what} must be a number, got {value!r}")
    score = float(value)
    if not 0.0 <= score <= 1.0:
        logger.warning("%s %.6g outside [0, 1]; clamping", what, score)
        score = min(1.0, max(0.0, score))
    return score


class RemoteDetector:
    """Open-vocabulary detector spoken to over the /detect protocol."""

    def __init__(self, endpoint: ServiceEndpoint):
        self.endpoint = endpoint

    @property
    def max_in_flight(self) -> int:
        return self.endpoint.max_in_flight

    def detect_boxes(self, frame: Frame, object_prompt: str, *,
                     frame_index: int | None = None) -> list[Detection]:
        if not object_prompt:
            raise ValueError("object prompt must be non-empty")
        payload = {
            "image_ppm_b64": base64.b64encode(write_netpbm(frame)).decode("ascii"),
            "prompt": object_prompt,
        }
        doc = _post_json(self.endpoint, "/detect", payload)
        boxes = doc.get("boxes")
        if not isinstance(boxes, list):
            raise ProtocolError("detector response missing 'boxes' list")
        detections = []
        for i, entry in enumerate(boxes):
            if not isinstance(entry, dict):
                raise ProtocolError(f"detector box {i} is not an object")
            try:
                coords = [float(entry[k]) for k in ("x1", "y1", "x2", "y2")]
            except (KeyError, TypeError, ValueError) as exc:
                raise ProtocolError(f"detector box {i} malformed: {exc}") from None
            try:
                box = BoundingBox(*coords)
            except InvalidGeometryError as exc:
                raise ProtocolError(f"detector box {i} invalid: {exc}") from None
            detections.append(Detection(box, _clamped_score(entry.get("score"), f"box {i} score")))
        detections.sort(key=lambda d: -d.s_text)
        return detections


def _load_questions() -> dict[str, str]:
    text = resources.files("anchorframe").joinpath("data/vlm_prompts.txt").read_text("utf-8")
    questions = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        attribute, question = line.split("\t", 1)
        questions[attribute] = question
    return questions


class RemoteVlm:
    """Semantic visibility evaluator spoken to over the /score protocol."""

    def __init__(self, endpoint: ServiceEndpoint):
        self.endpoint = endpoint
        self.questions = _load_questions()

    def attribute_visibility(self, crop: Frame, attribute: str, *,
                             frame_index: int | None = None,
                             crop_box: BoundingBox | None = None) -> float:
        question = self.questions.get(attribute)
        if question is None:
            raise ConfigError(f"no visibility question configured for attribute {attribute!r}")
        payload = {
            "image_ppm_b64": base64.b64encode(write_netpbm(crop)).decode("ascii"),
            "attribute": attribute,
            "question": question,
        }
        doc = _post_json(self.endpoint, "/score", payload)
        if "score" not in doc:
            raise ProtocolError("evaluator response missing 'score'")
        return _clamped_score(doc["score"], "evaluator score")


class MockDetector:
    """Ground-truth-driven detector stand-in.

    Frames whose true visibility falls below the threshold yield no
    detection (mimicking detector failure under heavy occlusion); otherwise
    the true box is returned, optionally center-jittered with a per-frame
    seeded Gaussian so results stay independent of call order.
    """

    def __init__(self, truth: GroundTruth, *, jitter: float = 0.0,
                 score_noise: float = 0.0, visibility_threshold: float = 0.25,
                 seed: int = 0):
        if not 0.0 <= score_noise < 1.0:
            raise ConfigError(f"score_noise must lie in [0, 1), got {score_noise}")
        if jitter < 0:
            raise ConfigError(f"jitter must be >= 0, got {jitter}")
        self.truth = truth
        self.jitter = jitter
        self.score_noise = score_noise
        self.visibility_threshold = visibility_threshold
        self.seed = seed

    def detect_boxes(self, frame: Frame, object_prompt: str, *,
                     frame_index: int | None = None) -> list[Detection]:
        if not object_prompt:
            raise ValueError("object prompt must be non-empty")
        if frame_index is None:
            raise ValueError("the mock detector needs frame_index to look up ground truth")
        entry = self.truth.frames[frame_index]
        if entry.visibility < self.visibility_threshold:
            return []
        box = entry.box
        if self.jitter > 0:
            rng = np.random.default_rng([self.seed, frame_index])
            dx, dy = rng.normal(0.0, self.jitter, size=2)
            box = box.translated(float(dx), float(dy))
        return [Detection(box, 1.0 - self.score_noise)]


class MockVlm:
    """Ground-truth-driven visibility evaluator stand-in.

    Scores the true attribute-patch visibility scaled by how much of the
    patch the crop actually contains; a crop that misses the patch scores 0.
    """

    def __init__(self, truth: GroundTruth):
        self.truth = truth

    def attribute_visibility(self, crop: Frame, attribute: str, *,
                             frame_index: int | None = None,
                             crop_box: BoundingBox | None = None) -> float:
        if frame_index is None or crop_box is None:
            raise ValueError("the mock evaluator needs frame_index and crop_box")
        entry = self.truth.frames[frame_index]
        covered = intersection_area(crop_box, entry.attribute_box)
        if covered <= 0:
            return 0.0
        return float(entry.attribute_visibility * covered / box_area(entry.attribute_box))
