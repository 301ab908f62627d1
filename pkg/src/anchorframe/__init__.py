"""Occlusion-aware keyframe selection and mask-tube propagation.

Library + CLI that picks the most reliable anchor frame of a video for a
given edit instruction (combining border completeness, bidirectional
tracking stability, and attribute visibility) and propagates the chosen box
into a dense per-frame mask tube with a built-in correlation tracker.
"""

__version__ = "0.1.0"

from .clients import Detection, MockDetector, MockVlm, RemoteDetector, RemoteVlm, ServiceEndpoint
from .config import CliConfig, load_config
from .errors import AnchorFrameError
from .geometry import BoundingBox, box_area, clamp_box, iou
from .image_io import (
    Frame,
    VideoSequence,
    crop,
    read_netpbm,
    read_sequence,
    resize_bilinear,
    to_grayscale,
    write_netpbm,
    write_sequence,
)
from .pipeline import (
    CandidateScore,
    KeyframeResult,
    MaskTube,
    UserBoxOverride,
    propagate_masks,
    propose_candidates,
    select_keyframe,
    write_result,
)
from .scoring import (
    EditPrompt,
    SelectorConfig,
    base_score,
    completeness_score,
    cycle_consistency_score,
    parse_prompt,
    region_weighted_mse,
    spatial_prior_factor,
    utility,
)
from .synth import (
    GroundTruth,
    SceneSpec,
    canonical_corpus,
    evaluate_selection,
    evaluate_tube,
    generate_scene,
)
from .tracker import TrackerConfig, TrackerState, TrackStep, detect, track_segment, train, update

__all__ = [
    "AnchorFrameError",
    "BoundingBox",
    "CandidateScore",
    "CliConfig",
    "Detection",
    "EditPrompt",
    "Frame",
    "GroundTruth",
    "KeyframeResult",
    "MaskTube",
    "MockDetector",
    "MockVlm",
    "RemoteDetector",
    "RemoteVlm",
    "SceneSpec",
    "SelectorConfig",
    "ServiceEndpoint",
    "TrackStep",
    "TrackerConfig",
    "TrackerState",
    "UserBoxOverride",
    "VideoSequence",
    "base_score",
    "box_area",
    "canonical_corpus",
    "clamp_box",
    "completeness_score",
    "crop",
    "cycle_consistency_score",
    "detect",
    "evaluate_selection",
    "evaluate_tube",
    "generate_scene",
    "iou",
    "load_config",
    "parse_prompt",
    "propagate_masks",
    "propose_candidates",
    "read_netpbm",
    "read_sequence",
    "region_weighted_mse",
    "resize_bilinear",
    "select_keyframe",
    "spatial_prior_factor",
    "to_grayscale",
    "track_segment",
    "train",
    "update",
    "utility",
    "write_netpbm",
    "write_result",
    "write_sequence",
]
