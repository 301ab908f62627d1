"""Frame-scoring primitives for keyframe selection.

Covers the border-completeness score, the bidirectional cycle-consistency
score, the joint utility, prompt parsing against plain-text keyword tables,
the spatial-prior weighting, and the region-weighted reconstruction loss.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, ShapeError, SingleFrameError, UnparseablePromptError
from .geometry import BoundingBox, iou
from .image_io import VideoSequence
from .tracker import TrackerConfig, TrackFunction, make_track_fn

SPATIAL_PRIORS = ("none", "left", "right", "top", "bottom", "center")
ATTRIBUTES = ("color", "material", "part", "shape", "style", "object-visibility")

_TOKEN_RE = re.compile(r"[a-z0-9']+")


@dataclass(frozen=True)
class SelectorConfig:
    """Keyframe-selection knobs. Defaults match the reference operating
    point: margin ratio 0.05, cycle window 5 frames, candidate pool 5,
    weights 0.5/0.3/0.2."""

    tau: float = 0.05
    delta_t: int = 5
    top_m: int = 5
    lambda_b: float = 0.5
    lambda_c: float = 0.3
    lambda_p: float = 0.2
    spatial_penalty: float = 0.25

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if self.delta_t < 1:
            raise ConfigError(f"delta_t must be >= 1, got {self.delta_t}")
        if self.top_m < 1:
            raise ConfigError(f"top_m must be >= 1, got {self.top_m}")
        for name in ("lambda_b", "lambda_c", "lambda_p"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.lambda_b == self.lambda_c == self.lambda_p == 0:
            raise ConfigError("at least one utility weight must be positive")
        if not 0 <= self.spatial_penalty <= 1:
            raise ConfigError(f"spatial_penalty must lie in [0, 1], got {self.spatial_penalty}")


@dataclass(frozen=True)
class EditPrompt:
    """Parsed edit instruction: the object to localize, an optional location
    hint, and the attribute category whose visibility matters for the edit."""

    raw: str
    object_prompt: str
    spatial_prior: str = "none"
    attribute: str = "object-visibility"

    def __post_init__(self) -> None:
        if not self.object_prompt:
            raise UnparseablePromptError("object prompt must be non-empty")
        if self.spatial_prior not in SPATIAL_PRIORS:
            raise ValueError(f"unknown spatial prior {self.spatial_prior!r}")
        if self.attribute not in ATTRIBUTES:
            raise ValueError(f"unknown attribute {self.attribute!r}")


@dataclass(frozen=True)
class KeywordTables:
    """Keyword lookup tables backing the deterministic prompt parser."""

    spatial: dict[str, str]  # word -> prior name
    attribute: dict[str, str]  # word -> attribute category
    verbs: frozenset[str]
    stopwords: frozenset[str]


_tables_cache: KeywordTables | None = None


def load_keyword_tables(path: str | Path | None = None) -> KeywordTables:
    """Parse a `category<TAB>word` table file (UTF-8, # comments allowed).

    Spatial categories are spatial-left/right/top/bottom/center; attribute
    categories are color/material/part/shape/style; `verb` and `stopword`
    hold the words stripped before picking the object noun phrase.
    """
    if path is None:
        text = resources.files("anchorframe").joinpath("data/keywords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    spatial: dict[str, str] = {}
    attribute: dict[str, str] = {}
    verbs: set[str] = set()
    stopwords: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            category, word = line.split("\t")
        except ValueError:
            raise ConfigError(f"keywords line {lineno}: expected 'category<TAB>word'") from None
        word = word.strip().lower()
        if category.startswith("spatial-"):
            prior = category[len("spatial-"):]
            if prior not in SPATIAL_PRIORS:
                raise ConfigError(f"keywords line {lineno}: unknown prior {prior!r}")
            spatial.setdefault(word, prior)
        elif category in ("color", "material", "part", "shape", "style"):
            attribute.setdefault(word, category)
        elif category == "verb":
            verbs.add(word)
        elif category == "stopword":
            stopwords.add(word)
        else:
            raise ConfigError(f"keywords line {lineno}: unknown category {category!r}")
    return KeywordTables(spatial, attribute, frozenset(verbs), frozenset(stopwords))


def _default_tables() -> KeywordTables:
    global _tables_cache
    if _tables_cache is None:
        _tables_cache = load_keyword_tables()
    return _tables_cache


def parse_prompt(text: str, tables: KeywordTables | None = None) -> EditPrompt:
    """Parse an edit instruction into object / spatial prior / attribute.

    Deterministic keyword matching: the first spatial keyword and the first
    attribute keyword (in token order) win; the object prompt is the first
    contiguous run of tokens that survives stripping verbs, stopwords,
    spatial words and attribute values.
    """
    tables = tables or _default_tables()
    tokens = _TOKEN_RE.findall(text.lower())
    if not tokens:
        raise UnparseablePromptError(f"no tokens in prompt {text!r}")

    spatial = "none"
    attribute = "object-visibility"
    for token in tokens:
        if spatial == "none" and token in tables.spatial:
            spatial = tables.spatial[token]
        if attribute == "object-visibility" and token in tables.attribute:
            attribute = tables.attribute[token]

    kept: list[tuple[int, str]] = [
        (i, tok)
        for i, tok in enumerate(tokens)
        if tok not in tables.verbs
        and tok not in tables.stopwords
        and tok not in tables.spatial
        and tok not in tables.attribute
    ]
    if not kept:
        raise UnparseablePromptError(f"no candidate object noun in prompt {text!r}")
    run = [kept[0][1]]
    for (prev_i, _), (i, tok) in zip(kept, kept[1:]):
        if i == prev_i + 1:
            run.append(tok)
        else:
            break
    return EditPrompt(raw=text, object_prompt=" ".join(run),
                      spatial_prior=spatial, attribute=attribute)


def completeness_score(box: BoundingBox, width: float, height: float, tau: float) -> float:
    """Border-distance score: 0 for a box touching the frame edge, ramping
    linearly to 1 once the closest edge is at least tau*min(W, H) away."""
    if tau <= 0:
        raise ConfigError(f"tau must be positive, got {tau}")
    d_min = min(box.x1, box.y1, width - box.x2, height - box.y2)
    return min(1.0, max(0.0, d_min / (tau * min(width, height))))


def base_score(s_text: float, s_comp: float) -> float:
    return s_text * s_comp


def spatial_prior_factor(box: BoundingBox, prior: str, width: float, height: float,
                         penalty: float = 0.25) -> float:
    """1.0 when the box center satisfies the location hint, else the penalty
    factor (soft penalty, not a hard filter, so a frame on the wrong side
    can still win when nothing better exists)."""
    cx, cy = box.center
    if prior == "none":
        ok = True
    elif prior == "left":
        ok = cx < width / 2
    elif prior == "right":
        ok = cx >= width / 2
    elif prior == "top":
        ok = cy < height / 2
    elif prior == "bottom":
        ok = cy >= height / 2
    elif prior == "center":
        ok = width / 4 <= cx <= 3 * width / 4 and height / 4 <= cy <= 3 * height / 4
    else:
        raise ValueError(f"unknown spatial prior {prior!r}")
    return 1.0 if ok else penalty


def cycle_consistency_score(
    video: VideoSequence,
    t: int,
    box: BoundingBox,
    delta_t: int,
    tracker_cfg: TrackerConfig | None = None,
    track_fn: TrackFunction | None = None,
) -> float:
    """Agreement between a box and its round-trip tracked recoveries.

    Two legs, each run with fresh tracker state: forward delta_t frames then
    back to t, and backward delta_t frames then forward to t. Each leg
    contributes IoU(box, recovered box); the spans truncate at the sequence
    boundaries and the result averages over the legs that were computable
    (legs run in the order forward-cycle, then backward-cycle). Raises
    SingleFrameError when no leg is computable (single-frame video).
    """
    if delta_t < 1:
        raise ConfigError(f"delta_t must be >= 1, got {delta_t}")
    if not 0 <= t < len(video):
        raise ValueError(f"frame {t} outside sequence of length {len(video)}")
    if track_fn is None:
        track_fn = make_track_fn(tracker_cfg or TrackerConfig())

    legs: list[float] = []
    fwd_span = min(delta_t, len(video) - 1 - t)
    if fwd_span >= 1:
        out = track_fn(video, t, box, "forward", fwd_span)
        back = track_fn(video, t + len(out), out[-1].box, "backward", len(out))
        legs.append(iou(box, back[-1].box))
    bwd_span = min(delta_t, t)
    if bwd_span >= 1:
        out = track_fn(video, t, box, "backward", bwd_span)
        fwd = track_fn(video, t - len(out), out[-1].box, "forward", len(out))
        legs.append(iou(box, fwd[-1].box))
    if not legs:
        raise SingleFrameError("no adjacent frames available for a tracking cycle")
    return sum(legs) / len(legs)


def utility(s_base: float, s_cyc: float, s_attr: float, cfg: SelectorConfig) -> float:
    """Joint score lambda_b*s_base + lambda_c*s_cyc + lambda_p*s_attr."""
    return cfg.lambda_b * s_base + cfg.lambda_c * s_cyc + cfg.lambda_p * s_attr


def region_weighted_mse(pred: np.ndarray, target: np.ndarray, mask: np.ndarray,
                        gamma: float) -> float:
    """Mean squared error plus gamma-weighted masked mean squared error.

    mean(r^2) + gamma * mean((r * mask)^2) with r = pred - target; both
    means run over all elements. gamma 0 reduces to plain MSE, an all-ones
    mask gives (1 + gamma) * MSE.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if not (pred.shape == target.shape == mask.shape):
        raise ShapeError(
            f"pred/target/mask shapes differ: {pred.shape}, {target.shape}, {mask.shape}"
        )
    if not np.all((mask == 0.0) | (mask == 1.0)):
        raise ValueError("mask must be binary (values 0 or 1)")
    residual = pred - target
    return float(np.mean(residual**2) + gamma * np.mean((residual * mask) ** 2))
