"""End-to-end keyframe selection and mask-tube propagation.

Orchestrates the full pass: propose a candidate box per frame, keep the
top-M by base score, add the expensive cycle/semantic terms for those
survivors, pick the argmax, and propagate the winning box through the whole
sequence as a dense tube of rectangular masks. Also owns the on-disk result
layout (result.json / tube.json / masks/).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clients import Detector, Vlm
from .errors import DegenerateBoxError, InputError, NoTargetFoundError, SingleFrameError
from .geometry import BoundingBox, clamp_box
from .image_io import Frame, VideoSequence, crop, read_frame, write_frame
from .scoring import (
    EditPrompt,
    SelectorConfig,
    completeness_score,
    cycle_consistency_score,
    parse_prompt,
    spatial_prior_factor,
    utility,
)
from .tracker import TrackerConfig, track_segment


@dataclass(frozen=True)
class UserBoxOverride:
    """Optional user-supplied box: a precise initialization for one frame.

    The override joins the scored candidate set with full text confidence
    rather than bypassing scoring, so the physics/semantic terms still apply.
    """

    frame: int
    box: BoundingBox


@dataclass(frozen=True)
class Proposal:
    frame: int
    box: BoundingBox
    s_text: float  # detector confidence, spatial-prior factor applied
    s_comp: float
    s_base: float


@dataclass(frozen=True)
class CandidateScore:
    frame: int
    box: BoundingBox
    s_text: float
    s_comp: float
    s_base: float
    s_cyc: float
    s_attr: float
    s_final: float


@dataclass(frozen=True)
class KeyframeResult:
    k_star: int
    box: BoundingBox
    prompt: EditPrompt
    candidates: tuple[CandidateScore, ...]


@dataclass(frozen=True)
class TubeEntry:
    frame: int
    box: BoundingBox
    occluded: bool
    mask: Frame | None


@dataclass(frozen=True)
class MaskTube:
    """Dense per-frame boxes/masks: exactly one entry per frame 0..T-1."""

    entries: tuple[TubeEntry, ...]

    def __post_init__(self) -> None:
        for i, entry in enumerate(self.entries):
            if entry.frame != i:
                raise ValueError(f"tube entry {i} carries frame index {entry.frame}")

    def __len__(self) -> int:
        return len(self.entries)


def rasterize_box(box: BoundingBox, width: int, height: int) -> Frame:
    """Binary mask covering the box: x1/y1 round down, x2/y2 round up,
    255 inside and 0 outside."""
    arr = np.zeros((height, width), dtype=np.uint8)
    x1 = max(0, math.floor(box.x1))
    y1 = max(0, math.floor(box.y1))
    x2 = min(width, math.ceil(box.x2))
    y2 = min(height, math.ceil(box.y2))
    if x2 > x1 and y2 > y1:
        arr[y1:y2, x1:x2] = 255
    return Frame(arr)


def propose_candidates(video: VideoSequence, prompt: EditPrompt, detector: Detector,
                       cfg: SelectorConfig) -> list[Proposal]:
    """One proposal per frame that has a usable detection, top-M by base score.

    Per frame the detections reduce to a single box by argmax of detector
    confidence times the spatial-prior factor; the base score multiplies in
    the border-completeness of the clamped box. Frames with no detection or
    a zero base score drop out; ties order by lower frame index.
    """
    width, height = video.width, video.height
    workers = int(getattr(detector, "max_in_flight", 1))

    def _detect(t: int) -> list:
        return detector.detect_boxes(video[t], prompt.object_prompt, frame_index=t)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            all_detections = list(pool.map(_detect, range(len(video))))
    else:
        all_detections = [_detect(t) for t in range(len(video))]

    proposals: list[Proposal] = []
    any_detection = False
    for t, detections in enumerate(all_detections):
        if not detections:
            continue
        any_detection = True
        best = max(
            detections,
            key=lambda d: d.s_text * spatial_prior_factor(
                d.box, prompt.spatial_prior, width, height, cfg.spatial_penalty
            ),
        )
        s_text = best.s_text * spatial_prior_factor(
            best.box, prompt.spatial_prior, width, height, cfg.spatial_penalty
        )
        try:
            box = clamp_box(best.box, width, height)
        except DegenerateBoxError:
            continue  # detector box fully outside the frame
        s_comp = completeness_score(box, width, height, cfg.tau)
        s_base = s_text * s_comp
        if s_base <= 0:
            continue
        proposals.append(Proposal(t, box, s_text, s_comp, s_base))

    if not proposals:
        if any_detection:
            raise NoTargetFoundError(
                "every detected box scored zero (border-touching or zero confidence); "
                "check the prompt or supply a box override"
            )
        raise NoTargetFoundError(
            "the detector found no box for the object prompt on any frame"
        )
    proposals.sort(key=lambda p: (-p.s_base, p.frame))
    return proposals[: cfg.top_m]


def select_keyframe(
    video: VideoSequence,
    raw_prompt: str,
    cfg: SelectorConfig,
    detector: Detector,
    vlm: Vlm,
    tracker_cfg: TrackerConfig | None = None,
    override: UserBoxOverride | None = None,
) -> KeyframeResult:
    """Run the full selection pass and return the argmax with its audit trail.

    A user override enters the candidate set with full text confidence (its
    completeness still computed from the clamped box) and is never dropped
    by the top-M filter. Exact final-score ties break toward the lowest
    frame index, which also makes the argmax independent of evaluation
    order. Every scored candidate is kept in the result for audit.
    """
    tracker_cfg = tracker_cfg or TrackerConfig()
    prompt = parse_prompt(raw_prompt)
    width, height = video.width, video.height

    try:
        proposals = propose_candidates(video, prompt, detector, cfg)
    except NoTargetFoundError:
        if override is None:
            raise
        proposals = []

    if override is not None:
        if not 0 <= override.frame < len(video):
            raise InputError(
                f"override frame {override.frame} outside sequence of length {len(video)}"
            )
        box = clamp_box(override.box, width, height)
        s_comp = completeness_score(box, width, height, cfg.tau)
        proposals = [p for p in proposals if p.frame != override.frame]
        proposals.append(Proposal(override.frame, box, 1.0, s_comp, s_comp))

    candidates: list[CandidateScore] = []
    for p in sorted(proposals, key=lambda p: p.frame):
        try:
            s_cyc = cycle_consistency_score(video, p.frame, p.box, cfg.delta_t, tracker_cfg)
        except SingleFrameError:
            s_cyc = 1.0  # no motion evidence is not negative evidence
        region = crop(video[p.frame], p.box)
        s_attr = vlm.attribute_visibility(
            region, prompt.attribute, frame_index=p.frame, crop_box=p.box
        )
        s_attr = min(1.0, max(0.0, float(s_attr)))
        s_final = utility(p.s_base, s_cyc, s_attr, cfg)
        candidates.append(
            CandidateScore(p.frame, p.box, p.s_text, p.s_comp, p.s_base, s_cyc, s_attr, s_final)
        )

    best = max(candidates, key=lambda c: (c.s_final, -c.frame))
    return KeyframeResult(best.frame, best.box, prompt, tuple(candidates))


def propagate_masks(video: VideoSequence, keyframe: int, box: BoundingBox,
                    tracker_cfg: TrackerConfig | None = None) -> MaskTube:
    """Bidirectional propagation of the keyframe box into a dense mask tube.

    Fresh tracker per direction; the keyframe's own entry uses the given
    box unoccluded. Every frame gets exactly one entry, occluded frames
    included (their boxes coast at the last confident position).
    """
    tracker_cfg = tracker_cfg or TrackerConfig()
    if not 0 <= keyframe < len(video):
        raise InputError(f"keyframe {keyframe} outside sequence of length {len(video)}")
    width, height = video.width, video.height
    box = clamp_box(box, width, height)

    forward = track_segment(video, keyframe, box, "forward", len(video) - 1 - keyframe, tracker_cfg)
    backward = track_segment(video, keyframe, box, "backward", keyframe, tracker_cfg)

    by_frame: dict[int, tuple[BoundingBox, bool]] = {keyframe: (box, False)}
    for i, step in enumerate(forward):
        by_frame[keyframe + 1 + i] = (step.box, step.occluded)
    for i, step in enumerate(backward):
        by_frame[keyframe - 1 - i] = (step.box, step.occluded)

    entries = tuple(
        TubeEntry(t, by_frame[t][0], by_frame[t][1], rasterize_box(by_frame[t][0], width, height))
        for t in range(len(video))
    )
    return MaskTube(entries)


# ---------------------------------------------------------------------------
# On-disk result layout


def result_to_dict(result: KeyframeResult, config: dict | None = None) -> dict:
    return {
        "k_star": result.k_star,
        "box": list(result.box.as_tuple()),
        "prompt": {
            "raw": result.prompt.raw,
            "object": result.prompt.object_prompt,
            "spatial": result.prompt.spatial_prior,
            "attribute": result.prompt.attribute,
        },
        "candidates": [
            {
                "frame": c.frame,
                "box": list(c.box.as_tuple()),
                "s_text": c.s_text,
                "s_comp": c.s_comp,
                "s_base": c.s_base,
                "s_cyc": c.s_cyc,
                "s_attr": c.s_attr,
                "s_final": c.s_final,
            }
            for c in result.candidates
        ],
        "config": config or {},
    }


def result_from_dict(doc: dict) -> KeyframeResult:
    try:
        prompt = EditPrompt(
            raw=doc["prompt"]["raw"],
            object_prompt=doc["prompt"]["object"],
            spatial_prior=doc["prompt"]["spatial"],
            attribute=doc["prompt"]["attribute"],
        )
        candidates = tuple(
            CandidateScore(
                frame=int(c["frame"]),
                box=BoundingBox(*c["box"]),
                s_text=float(c["s_text"]),
                s_comp=float(c["s_comp"]),
                s_base=float(c["s_base"]),
                s_cyc=float(c["s_cyc"]),
                s_attr=float(c["s_attr"]),
                s_final=float(c["s_final"]),
            )
            for c in doc["candidates"]
        )
        return KeyframeResult(int(doc["k_star"]), BoundingBox(*doc["box"]), prompt, candidates)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed result document: {exc}") from None


def read_result(path: str | Path) -> KeyframeResult:
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except FileNotFoundError:
        raise InputError(f"result file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"result file {path} is not valid JSON: {exc}") from None
    return result_from_dict(doc)


def _dump_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True), "utf-8")


def write_result(result: KeyframeResult, tube: MaskTube, out_dir: str | Path,
                 config: dict | None = None) -> dict:
    """Persist result.json, tube.json and masks/mask_%06d.pgm under out_dir.

    Returns (and also writes) a manifest listing every written file with its
    size in bytes.
    """
    out = Path(out_dir)
    masks_dir = out / "masks"
    masks_dir.mkdir(parents=True, exist_ok=True)

    written: list[Path] = []
    result_path = out / "result.json"
    _dump_json(result_path, result_to_dict(result, config))
    written.append(result_path)

    tube_path = out / "tube.json"
    _dump_json(
        tube_path,
        {
            "frames": [
                {"frame": e.frame, "box": list(e.box.as_tuple()), "occluded": e.occluded}
                for e in tube.entries
            ]
        },
    )
    written.append(tube_path)

    for entry in tube.entries:
        if entry.mask is None:
            raise InputError(f"tube entry {entry.frame} has no mask to write")
        mask_path = masks_dir / f"mask_{entry.frame:06d}.pgm"
        write_frame(mask_path, entry.mask)
        written.append(mask_path)

    manifest = {
        "files": [
            {"path": str(p.relative_to(out)), "size": p.stat().st_size} for p in written
        ]
    }
    _dump_json(out / "manifest.json", manifest)
    return manifest


def read_tube(out_dir: str | Path, with_masks: bool = True) -> MaskTube:
    """Reload a tube written by write_result (masks optional)."""
    out = Path(out_dir)
    try:
        doc = json.loads((out / "tube.json").read_text("utf-8"))
    except FileNotFoundError:
        raise InputError(f"tube.json not found in {out}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"tube.json in {out} is not valid JSON: {exc}") from None
    try:
        entries = []
        for e in doc["frames"]:
            mask = None
            if with_masks:
                mask = read_frame(out / "masks" / f"mask_{int(e['frame']):06d}.pgm")
            entries.append(
                TubeEntry(int(e["frame"]), BoundingBox(*e["box"]), bool(e["occluded"]), mask)
            )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed tube document in {out}: {exc}") from None
    except FileNotFoundError as exc:
        raise InputError(f"missing mask file: {exc}") from None
    return MaskTube(tuple(entries))
