"""Seeded synthetic occlusion scenes with exact per-frame ground truth.

Each scene renders a textured target moving over a textured background in
painter's order (background, target, occluder), quantized to integer pixel
positions so the ground-truth boxes correspond exactly to rendered pixels.
Visibility values are exact rational pixel counts, never approximations.
The ground-truth sidecar drives both the offline mock backends and the
evaluation metrics, and a canonical scene corpus ships in-repo as the
acceptance workload.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, SceneSpecError
from .geometry import BoundingBox, intersect_boxes, intersection_area, box_area, iou, round_half_up
from .image_io import Frame, VideoSequence

_TEXTURES = ("checker", "noise")
_PATH_KINDS = ("static", "linear", "sinusoidal")


@dataclass(frozen=True)
class PathSpec:
    """Center trajectory: start + velocity*t + amplitude*sin(2*pi*t/period)."""

    kind: str
    start: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    amplitude: tuple[float, float] = (0.0, 0.0)
    period: float = 40.0

    def __post_init__(self) -> None:
        if self.kind not in _PATH_KINDS:
            raise SceneSpecError(f"unknown path kind {self.kind!r}")
        if self.kind == "sinusoidal" and self.period <= 0:
            raise SceneSpecError(f"sinusoidal period must be positive, got {self.period}")

    def center_at(self, t: int) -> tuple[float, float]:
        x, y = self.start
        if self.kind in ("linear", "sinusoidal"):
            x += self.velocity[0] * t
            y += self.velocity[1] * t
        if self.kind == "sinusoidal":
            phase = np.sin(2.0 * np.pi * t / self.period)
            x += self.amplitude[0] * phase
            y += self.amplitude[1] * phase
        return x, y


@dataclass(frozen=True)
class TargetSpec:
    size: tuple[int, int]  # (w, h) integer pixels
    texture: str
    path: PathSpec
    attribute_patch: tuple[float, float, float, float]  # relative x1,y1,x2,y2
    cell: int = 8

    def __post_init__(self) -> None:
        _validate_object("target", self.size, self.texture, self.cell)
        rx1, ry1, rx2, ry2 = self.attribute_patch
        if not (0 <= rx1 < rx2 <= 1 and 0 <= ry1 < ry2 <= 1):
            raise SceneSpecError(f"attribute_patch must be a sub-box of [0,1]^2, got {self.attribute_patch}")


@dataclass(frozen=True)
class OccluderSpec:
    size: tuple[int, int]
    texture: str
    path: PathSpec
    active_interval: tuple[int, int]
    cell: int = 8

    def __post_init__(self) -> None:
        _validate_object("occluder", self.size, self.texture, self.cell)
        t0, t1 = self.active_interval
        if not 0 <= t0 <= t1:
            raise SceneSpecError(f"active_interval must satisfy 0 <= t0 <= t1, got {self.active_interval}")


@dataclass(frozen=True)
class SceneSpec:
    name: str
    width: int
    height: int
    num_frames: int
    seed: int
    background: str
    target: TargetSpec
    occluder: OccluderSpec | None = None
    background_cell: int = 16

    def __post_init__(self) -> None:
        if self.width < 8 or self.height < 8:
            raise SceneSpecError(f"scene must be at least 8x8, got {self.width}x{self.height}")
        if self.num_frames < 1:
            raise SceneSpecError(f"num_frames must be >= 1, got {self.num_frames}")
        if self.background not in _TEXTURES:
            raise SceneSpecError(f"unknown background texture {self.background!r}")
        if self.background_cell < 1:
            raise SceneSpecError(f"background_cell must be >= 1, got {self.background_cell}")
        if self.occluder is not None and self.occluder.active_interval[1] >= self.num_frames:
            raise SceneSpecError(
                f"active_interval {self.occluder.active_interval} exceeds "
                f"num_frames {self.num_frames}"
            )


def _validate_object(what: str, size: tuple[int, int], texture: str, cell: int) -> None:
    w, h = size
    if w < 1 or h < 1:
        raise SceneSpecError(f"{what} size must be positive, got {size}")
    if texture not in _TEXTURES:
        raise SceneSpecError(f"unknown {what} texture {texture!r}")
    if cell < 1:
        raise SceneSpecError(f"{what} cell must be >= 1, got {cell}")


@dataclass(frozen=True)
class FrameTruth:
    """Exact per-frame annotation: target box (possibly overhanging the
    frame), visible target-area fraction, visible attribute-patch fraction,
    and the attribute patch rectangle in frame coordinates."""

    box: BoundingBox
    visibility: float
    attribute_visibility: float
    attribute_box: BoundingBox


@dataclass(frozen=True)
class GroundTruth:
    width: int
    height: int
    frames: tuple[FrameTruth, ...]


def _texture_bitmap(kind: str, w: int, h: int, cell: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "noise":
        return rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
    # Checker: two contrasting colors; a cell larger than the bitmap acts
    # as a solid block, which the corpus uses for textureless occluders.
    dark = rng.integers(10, 90, size=3, dtype=np.uint8)
    bright = rng.integers(160, 246, size=3, dtype=np.uint8)
    ys = (np.arange(h) // cell)[:, np.newaxis]
    xs = (np.arange(w) // cell)[np.newaxis, :]
    parity = ((ys + xs) % 2).astype(bool)
    out = np.where(parity[..., np.newaxis], bright[np.newaxis, np.newaxis, :],
                   dark[np.newaxis, np.newaxis, :])
    return out.astype(np.uint8)


def _blit(canvas: np.ndarray, bitmap: np.ndarray, x1: int, y1: int) -> None:
    ch, cw = canvas.shape[:2]
    bh, bw = bitmap.shape[:2]
    sx, sy = max(0, -x1), max(0, -y1)
    dx, dy = max(0, x1), max(0, y1)
    ex = min(bw, cw - x1)
    ey = min(bh, ch - y1)
    if ex > sx and ey > sy:
        canvas[dy : dy + (ey - sy), dx : dx + (ex - sx)] = bitmap[sy:ey, sx:ex]


def _object_rect(path: PathSpec, size: tuple[int, int], t: int) -> tuple[int, int, int, int]:
    cx, cy = path.center_at(t)
    w, h = size
    x1 = round_half_up(cx - w / 2.0)
    y1 = round_half_up(cy - h / 2.0)
    return x1, y1, x1 + w, y1 + h


def _visible_fraction(rect: BoundingBox, frame_box: BoundingBox,
                      occluder: BoundingBox | None) -> float:
    on_screen = intersect_boxes(rect, frame_box)
    if on_screen is None:
        return 0.0
    visible = box_area(on_screen)
    if occluder is not None:
        visible -= intersection_area(on_screen, occluder)
    return visible / box_area(rect)


def generate_scene(spec: SceneSpec) -> tuple[VideoSequence, GroundTruth]:
    """Render a scene deterministically from its seed; pure, writes nothing.

    All randomness flows through named generators seeded by (spec.seed,
    object index), so two runs are byte-identical and textures stay stable
    when other parts of the spec change.
    """
    bg = _texture_bitmap(spec.background, spec.width, spec.height, spec.background_cell,
                         np.random.default_rng([spec.seed, 0]))
    target_bmp = _texture_bitmap(spec.target.texture, spec.target.size[0],
                                 spec.target.size[1], spec.target.cell,
                                 np.random.default_rng([spec.seed, 1]))
    tw, th = spec.target.size
    rx1, ry1, rx2, ry2 = spec.target.attribute_patch
    px1 = round_half_up(rx1 * tw)
    py1 = round_half_up(ry1 * th)
    px2 = round_half_up(rx2 * tw)
    py2 = round_half_up(ry2 * th)
    if px1 >= px2 or py1 >= py2:
        raise SceneSpecError(f"attribute_patch {spec.target.attribute_patch} rounds to zero pixels")
    patch_rng = np.random.default_rng([spec.seed, 3])
    patch_color = np.array([200 + patch_rng.integers(0, 40), patch_rng.integers(10, 60),
                            patch_rng.integers(10, 60)], dtype=np.uint8)
    target_bmp = target_bmp.copy()
    target_bmp[py1:py2, px1:px2] = patch_color

    occ_bmp = None
    if spec.occluder is not None:
        occ_bmp = _texture_bitmap(spec.occluder.texture, spec.occluder.size[0],
                                  spec.occluder.size[1], spec.occluder.cell,
                                  np.random.default_rng([spec.seed, 2]))

    frame_box = BoundingBox(0, 0, spec.width, spec.height)
    frames: list[Frame] = []
    truths: list[FrameTruth] = []
    for t in range(spec.num_frames):
        canvas = bg.copy()
        tx1, ty1, tx2, ty2 = _object_rect(spec.target.path, spec.target.size, t)
        _blit(canvas, target_bmp, tx1, ty1)

        occ_box = None
        if spec.occluder is not None:
            t0, t1 = spec.occluder.active_interval
            if t0 <= t <= t1:
                ox1, oy1, ox2, oy2 = _object_rect(spec.occluder.path, spec.occluder.size, t)
                _blit(canvas, occ_bmp, ox1, oy1)
                occ_box = BoundingBox(ox1, oy1, ox2, oy2)

        target_box = BoundingBox(tx1, ty1, tx2, ty2)
        attr_box = BoundingBox(tx1 + px1, ty1 + py1, tx1 + px2, ty1 + py2)
        truths.append(
            FrameTruth(
                box=target_box,
                visibility=_visible_fraction(target_box, frame_box, occ_box),
                attribute_visibility=_visible_fraction(attr_box, frame_box, occ_box),
                attribute_box=attr_box,
            )
        )
        frames.append(Frame(canvas))
    return VideoSequence(tuple(frames)), GroundTruth(spec.width, spec.height, tuple(truths))


# ---------------------------------------------------------------------------
# Evaluation metrics


@dataclass(frozen=True)
class SelectionReport:
    kf_visibility: float
    kf_attr_visibility: float
    is_complete: bool


@dataclass(frozen=True)
class TubeReport:
    """Mean IoU over frames whose ground-truth visibility clears the floor.

    mean_iou is None (not NaN) when no frame qualifies; per_frame_iou always
    covers every frame.
    """

    mean_iou: float | None
    per_frame_iou: tuple[float, ...]
    num_scored_frames: int


def evaluate_selection(result, truth: GroundTruth) -> SelectionReport:
    """Read the ground truth at the selected keyframe.

    is_complete is true iff the true target box at the keyframe does not
    touch the frame border.
    """
    k = result.k_star
    if not 0 <= k < len(truth.frames):
        raise InputError(f"keyframe {k} outside ground truth of length {len(truth.frames)}")
    entry = truth.frames[k]
    b = entry.box
    complete = b.x1 > 0 and b.y1 > 0 and b.x2 < truth.width and b.y2 < truth.height
    return SelectionReport(
        kf_visibility=entry.visibility,
        kf_attr_visibility=entry.attribute_visibility,
        is_complete=complete,
    )


def evaluate_tube(tube, truth: GroundTruth, visibility_floor: float) -> TubeReport:
    """Per-frame IoU of tube boxes against true boxes, averaged over frames
    the target is sufficiently visible in."""
    if len(tube.entries) != len(truth.frames):
        raise InputError(
            f"tube has {len(tube.entries)} frames, ground truth has {len(truth.frames)}"
        )
    per_frame = tuple(
        iou(entry.box, truth.frames[entry.frame].box) for entry in tube.entries
    )
    scored = [
        per_frame[i] for i, ft in enumerate(truth.frames) if ft.visibility >= visibility_floor
    ]
    mean = sum(scored) / len(scored) if scored else None
    return TubeReport(mean_iou=mean, per_frame_iou=per_frame, num_scored_frames=len(scored))


# ---------------------------------------------------------------------------
# JSON sidecars


def scene_spec_to_dict(spec: SceneSpec) -> dict:
    doc = {
        "name": spec.name,
        "width": spec.width,
        "height": spec.height,
        "num_frames": spec.num_frames,
        "seed": spec.seed,
        "background": spec.background,
        "background_cell": spec.background_cell,
        "target": {
            "size": list(spec.target.size),
            "texture": spec.target.texture,
            "cell": spec.target.cell,
            "path": _path_to_dict(spec.target.path),
            "attribute_patch": list(spec.target.attribute_patch),
        },
        "occluder": None,
    }
    if spec.occluder is not None:
        doc["occluder"] = {
            "size": list(spec.occluder.size),
            "texture": spec.occluder.texture,
            "cell": spec.occluder.cell,
            "path": _path_to_dict(spec.occluder.path),
            "active_interval": list(spec.occluder.active_interval),
        }
    return doc


def _path_to_dict(path: PathSpec) -> dict:
    return {
        "kind": path.kind,
        "start": list(path.start),
        "velocity": list(path.velocity),
        "amplitude": list(path.amplitude),
        "period": path.period,
    }


def _check_keys(doc: dict, allowed: dict[str, bool], where: str) -> None:
    unknown = set(doc) - set(allowed)
    if unknown:
        raise SceneSpecError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = [k for k, required in allowed.items() if required and k not in doc]
    if missing:
        raise SceneSpecError(f"missing keys in {where}: {missing}")


def _path_from_dict(doc: dict, where: str) -> PathSpec:
    if not isinstance(doc, dict):
        raise SceneSpecError(f"{where} must be an object")
    _check_keys(doc, {"kind": True, "start": True, "velocity": False,
                    "amplitude": False, "period": False}, where)
    return PathSpec(
        kind=doc["kind"],
        start=tuple(float(v) for v in doc["start"]),
        velocity=tuple(float(v) for v in doc.get("velocity", (0.0, 0.0))),
        amplitude=tuple(float(v) for v in doc.get("amplitude", (0.0, 0.0))),
        period=float(doc.get("period", 40.0)),
    )


def scene_spec_from_dict(doc: dict) -> SceneSpec:
    if not isinstance(doc, dict):
        raise SceneSpecError("scene spec must be a JSON object")
    _check_keys(doc, {"name": True, "width": True, "height": True, "num_frames": True,
                    "seed": True, "background": True, "background_cell": False,
                    "target": True, "occluder": False}, "scene")
    tdoc = doc["target"]
    if not isinstance(tdoc, dict):
        raise SceneSpecError("target must be an object")
    _check_keys(tdoc, {"size": True, "texture": True, "cell": False, "path": True,
                     "attribute_patch": True}, "target")
    target = TargetSpec(
        size=tuple(int(v) for v in tdoc["size"]),
        texture=tdoc["texture"],
        path=_path_from_dict(tdoc["path"], "target.path"),
        attribute_patch=tuple(float(v) for v in tdoc["attribute_patch"]),
        cell=int(tdoc.get("cell", 8)),
    )
    occluder = None
    odoc = doc.get("occluder")
    if odoc is not None:
        if not isinstance(odoc, dict):
            raise SceneSpecError("occluder must be an object or null")
        _check_keys(odoc, {"size": True, "texture": True, "cell": False, "path": True,
                         "active_interval": True}, "occluder")
        occluder = OccluderSpec(
            size=tuple(int(v) for v in odoc["size"]),
            texture=odoc["texture"],
            path=_path_from_dict(odoc["path"], "occluder.path"),
            active_interval=tuple(int(v) for v in odoc["active_interval"]),
            cell=int(odoc.get("cell", 8)),
        )
    return SceneSpec(
        name=str(doc["name"]),
        width=int(doc["width"]),
        height=int(doc["height"]),
        num_frames=int(doc["num_frames"]),
        seed=int(doc["seed"]),
        background=doc["background"],
        target=target,
        occluder=occluder,
        background_cell=int(doc.get("background_cell", 16)),
    )


def read_scene_spec(path: str | Path) -> SceneSpec:
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except FileNotFoundError:
        raise InputError(f"scene spec not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SceneSpecError(f"scene spec {path} is not valid JSON: {exc}") from None
    return scene_spec_from_dict(doc)


def truth_to_dict(truth: GroundTruth) -> dict:
    return {
        "width": truth.width,
        "height": truth.height,
        "frames": [
            {
                "box": list(ft.box.as_tuple()),
                "visibility": ft.visibility,
                "attribute_visibility": ft.attribute_visibility,
                "attribute_box": list(ft.attribute_box.as_tuple()),
            }
            for ft in truth.frames
        ],
    }


def truth_from_dict(doc: dict) -> GroundTruth:
    try:
        frames = tuple(
            FrameTruth(
                box=BoundingBox(*entry["box"]),
                visibility=float(entry["visibility"]),
                attribute_visibility=float(entry["attribute_visibility"]),
                attribute_box=BoundingBox(*entry["attribute_box"]),
            )
            for entry in doc["frames"]
        )
        return GroundTruth(int(doc["width"]), int(doc["height"]), frames)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed ground-truth document: {exc}") from None


def read_truth(path: str | Path) -> GroundTruth:
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except FileNotFoundError:
        raise InputError(f"ground truth not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"ground truth {path} is not valid JSON: {exc}") from None
    return truth_from_dict(doc)


def write_truth(path: str | Path, truth: GroundTruth) -> None:
    Path(path).write_text(json.dumps(truth_to_dict(truth), indent=2, sort_keys=True), "utf-8")


# ---------------------------------------------------------------------------
# Canonical corpus


def _occlusion_scene(name: str, seed: int, *, target_path: PathSpec,
                     occ_size: tuple[int, int], occ_texture: str, occ_cell: int,
                     occ_path: PathSpec, interval: tuple[int, int],
                     target_size: tuple[int, int] = (44, 34),
                     background: str = "checker") -> SceneSpec:
    return SceneSpec(
        name=name, width=320, height=240, num_frames=81, seed=seed,
        background=background,
        target=TargetSpec(size=target_size, texture="noise", path=target_path,
                          attribute_patch=(0.3, 0.25, 0.75, 0.7)),
        occluder=OccluderSpec(size=occ_size, texture=occ_texture, cell=occ_cell,
                              path=occ_path, active_interval=interval),
    )


def _solid(size: tuple[int, int]) -> tuple[str, int]:
    # A checker cell larger than the bitmap renders as one solid block.
    return "checker", max(size) + 1


def canonical_corpus() -> tuple[SceneSpec, ...]:
    """The in-repo acceptance corpus: motion variants without occlusion,
    border-exit and hidden-attribute specials, and twenty occlusion scenes
    spanning early/mid/late intervals with solid and periodic occluders."""
    scenes: list[SceneSpec] = []
    patch = (0.3, 0.25, 0.75, 0.7)

    # Motion variants, no occluder.
    scenes.append(SceneSpec(
        name="static_center", width=320, height=240, num_frames=81, seed=101,
        background="checker",
        target=TargetSpec(size=(44, 34), texture="noise",
                          path=PathSpec("static", (160.0, 120.0)), attribute_patch=patch)))
    scenes.append(SceneSpec(
        name="static_offcenter", width=320, height=240, num_frames=81, seed=102,
        background="checker",
        target=TargetSpec(size=(40, 40), texture="noise",
                          path=PathSpec("static", (96.0, 80.0)), attribute_patch=patch)))
    scenes.append(SceneSpec(
        name="linear_slow", width=320, height=240, num_frames=81, seed=103,
        background="checker",
        target=TargetSpec(size=(44, 34), texture="noise",
                          path=PathSpec("linear", (70.0, 110.0), velocity=(1.5, 0.3)),
                          attribute_patch=patch)))
    scenes.append(SceneSpec(
        name="linear_fast", width=320, height=240, num_frames=81, seed=104,
        background="noise",
        target=TargetSpec(size=(44, 34), texture="noise",
                          path=PathSpec("linear", (70.0, 160.0), velocity=(2.4, -0.8)),
                          attribute_patch=patch)))
    scenes.append(SceneSpec(
        name="linear_noise_bg", width=320, height=240, num_frames=81, seed=105,
        background="noise",
        target=TargetSpec(size=(44, 34), texture="noise",
                          path=PathSpec("linear", (80.0, 100.0), velocity=(1.8, 0.5)),
                          attribute_patch=patch)))
    scenes.append(SceneSpec(
        name="sine_vertical", width=320, height=240, num_frames=81, seed=106,
        background="checker",
        target=TargetSpec(size=(44, 34), texture="noise",
                          path=PathSpec("sinusoidal", (90.0, 120.0), velocity=(1.2, 0.0),
                                        amplitude=(0.0, 16.0), period=40.0),
                          attribute_patch=patch)))

    # Border exit: the target progressively leaves through the right edge.
    scenes.append(SceneSpec(
        name="border_exit", width=320, height=240, num_frames=81, seed=107,
        background="checker",
        target=TargetSpec(size=(44, 34), texture="noise",
                          path=PathSpec("linear", (120.0, 120.0), velocity=(2.8, 0.0)),
                          attribute_patch=patch)))

    # Attribute patch permanently covered by a small solid occluder riding
    # the target; overall visibility stays high so every frame is detectable.
    rider_tex, rider_cell = _solid((22, 18))
    scenes.append(SceneSpec(
        name="hidden_attribute", width=320, height=240, num_frames=81, seed=108,
        background="checker",
        target=TargetSpec(size=(44, 34), texture="noise",
                          path=PathSpec("linear", (80.0, 120.0), velocity=(1.6, 0.2)),
                          attribute_patch=(0.3, 0.25, 0.7, 0.7)),
        occluder=OccluderSpec(size=(22, 18), texture=rider_tex, cell=rider_cell,
                              path=PathSpec("linear", (80.0, 119.0), velocity=(1.6, 0.2)),
                              active_interval=(0, 80))))

    # Occlusion scenes. Unless noted the target moves linearly and the
    # occluder sits on the target path at the middle of its active interval.
    def linear_target(seed_dx: float = 0.0):
        return PathSpec("linear", (66.0 + seed_dx, 120.0), velocity=(1.6, 0.2))

    def on_path(path: PathSpec, t_mid: int, dy: float = 0.0) -> PathSpec:
        cx, cy = path.center_at(t_mid)
        return PathSpec("static", (cx, cy + dy))

    big = (64, 52)
    solid_tex, solid_cell = _solid(big)

    tp = linear_target()
    scenes.append(_occlusion_scene("occ_static_early", 201, target_path=tp,
                                   occ_size=big, occ_texture=solid_tex, occ_cell=solid_cell,
                                   occ_path=on_path(tp, 16), interval=(8, 24)))
    tp = linear_target(4.0)
    scenes.append(_occlusion_scene("occ_static_mid", 202, target_path=tp,
                                   occ_size=big, occ_texture=solid_tex, occ_cell=solid_cell,
                                   occ_path=on_path(tp, 40), interval=(30, 50)))
    tp = linear_target(-6.0)
    scenes.append(_occlusion_scene("occ_static_late", 203, target_path=tp,
                                   occ_size=big, occ_texture=solid_tex, occ_cell=solid_cell,
                                   occ_path=on_path(tp, 62), interval=(54, 70)))

    scenes.append(_occlusion_scene(
        "occ_sweep_mid", 204,
        target_path=PathSpec("static", (170.0, 120.0)),
        occ_size=big, occ_texture=solid_tex, occ_cell=solid_cell,
        occ_path=PathSpec("linear", (300.0, 120.0), velocity=(-3.2, 0.0)),
        interval=(20, 60)))
    scenes.append(_occlusion_scene(
        "occ_sweep_fast", 205,
        target_path=PathSpec("static", (160.0, 130.0)),
        occ_size=big, occ_texture=solid_tex, occ_cell=solid_cell,
        occ_path=PathSpec("linear", (320.0, 130.0), velocity=(-4.0, 0.0)),
        interval=(25, 55)))

    tp = linear_target(2.0)
    scenes.append(_occlusion_scene("occ_checker_early", 206, target_path=tp,
                                   occ_size=big, occ_texture="checker", occ_cell=6,
                                   occ_path=on_path(tp, 18), interval=(10, 26)))
    tp = linear_target(0.0)
    scenes.append(_occlusion_scene("occ_checker_mid", 207, target_path=tp,
                                   occ_size=big, occ_texture="checker", occ_cell=5,
                                   occ_path=on_path(tp, 40), interval=(31, 49)))
    tp = linear_target(-4.0)
    scenes.append(_occlusion_scene("occ_checker_late", 208, target_path=tp,
                                   occ_size=big, occ_texture="checker", occ_cell=6,
                                   occ_path=on_path(tp, 60), interval=(52, 68)))

    # Partial occlusion only: a small occluder sweeps across the target, so
    # coverage never reaches 100% but the crossing perturbs tracking.
    small = (30, 40)
    small_tex, small_cell = _solid(small)
    scenes.append(_occlusion_scene(
        "occ_partial_mid", 209,
        target_path=PathSpec("static", (160.0, 120.0)),
        occ_size=small, occ_texture=small_tex, occ_cell=small_cell,
        occ_path=PathSpec("linear", (236.0, 120.0), velocity=(-1.9, 0.0)),
        interval=(30, 50)))
    scenes.append(_occlusion_scene(
        "occ_partial_late", 210,
        target_path=PathSpec("static", (150.0, 126.0)),
        occ_size=small, occ_texture=small_tex, occ_cell=small_cell,
        occ_path=PathSpec("linear", (72.0, 126.0), velocity=(1.6, 0.0)),
        interval=(44, 70)))

    scenes.append(_occlusion_scene(
        "occ_both_moving", 211,
        target_path=PathSpec("linear", (70.0, 120.0), velocity=(1.6, 0.0)),
        occ_size=big, occ_texture=solid_tex, occ_cell=solid_cell,
        occ_path=PathSpec("linear", (280.0, 120.0), velocity=(-2.2, 0.0)),
        interval=(22, 62)))
    scenes.append(_occlusion_scene(
        "occ_sine_target", 212,
        target_path=PathSpec("sinusoidal", (90.0, 120.0), velocity=(1.4, 0.0),
                             amplitude=(0.0, 14.0), period=45.0),
        occ_size=(70, 70), occ_texture=solid_tex, occ_cell=71,
        occ_path=PathSpec("static", (146.0, 120.0)), interval=(28, 52)))
    tp = linear_target(3.0)
    scenes.append(_occlusion_scene("occ_long_mid", 213, target_path=tp,
                                   occ_size=(78, 60), occ_texture=solid_tex, occ_cell=79,
                                   occ_path=on_path(tp, 42), interval=(22, 62)))
    scenes.append(_occlusion_scene(
        "occ_vertical_sweep", 214,
        target_path=PathSpec("static", (160.0, 120.0)),
        occ_size=(72, 56), occ_texture=solid_tex, occ_cell=73,
        occ_path=PathSpec("linear", (160.0, 252.0), velocity=(0.0, -3.2)),
        interval=(20, 62)))
    scenes.append(_occlusion_scene(
        "occ_slow_sweep", 215,
        target_path=PathSpec("static", (150.0, 118.0)),
        occ_size=big, occ_texture="checker", occ_cell=6,
        occ_path=PathSpec("linear", (260.0, 118.0), velocity=(-2.4, 0.0)),
        interval=(15, 65)))
    tp = linear_target(5.0)
    scenes.append(_occlusion_scene("occ_small_cell", 216, target_path=tp,
                                   occ_size=big, occ_texture="checker", occ_cell=4,
                                   occ_path=on_path(tp, 40), interval=(30, 52)))
    tp = linear_target(-3.0)
    scenes.append(_occlusion_scene("occ_big_solid", 217, target_path=tp,
                                   occ_size=(96, 80), occ_texture=solid_tex, occ_cell=97,
                                   occ_path=on_path(tp, 42), interval=(30, 55)))
    scenes.append(_occlusion_scene(
        "occ_edge_region", 218,
        target_path=PathSpec("linear", (60.0, 60.0), velocity=(2.2, 0.6)),
        occ_size=big, occ_texture=solid_tex, occ_cell=solid_cell,
        occ_path=PathSpec("static", (148.0, 84.0)), interval=(28, 52)))
    scenes.append(_occlusion_scene(
        "occ_late_long", 219,
        target_path=PathSpec("linear", (66.0, 126.0), velocity=(1.4, 0.0)),
        occ_size=big, occ_texture="checker", occ_cell=6,
        occ_path=PathSpec("linear", (286.0, 126.0), velocity=(-2.6, 0.0)),
        interval=(50, 78)))
    # Video opens fully occluded: a solid occluder rides the target until its
    # interval expires, so the first detectable frames are fully visible.
    scenes.append(_occlusion_scene(
        "occ_early_from0", 220,
        target_path=PathSpec("linear", (110.0, 120.0), velocity=(2.0, 0.0)),
        occ_size=(84, 68), occ_texture=solid_tex, occ_cell=85,
        occ_path=PathSpec("linear", (110.0, 120.0), velocity=(2.0, 0.0)),
        interval=(0, 20)))
    scenes.append(_occlusion_scene(
        "occ_diag_sweep", 221,
        target_path=PathSpec("static", (170.0, 110.0)),
        occ_size=big, occ_texture="checker", occ_cell=5,
        occ_path=PathSpec("linear", (260.0, 30.0), velocity=(-2.4, 2.2)),
        interval=(18, 58)))
    tp = PathSpec("linear", (76.0, 150.0), velocity=(1.8, -0.5))
    scenes.append(_occlusion_scene("occ_mixed_motion", 222, target_path=tp,
                                   occ_size=(58, 64), occ_texture=solid_tex, occ_cell=65,
                                   occ_path=PathSpec("sinusoidal", on_path(tp, 40).start,
                                                     amplitude=(26.0, 0.0), period=60.0),
                                   interval=(26, 56)))

    return tuple(scenes)
