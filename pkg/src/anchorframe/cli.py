"""Command-line interface.

Subcommands: ``synth`` (render a synthetic scene), ``select`` (run keyframe
selection and mask propagation on a frame directory), ``eval`` (score a
selection run against ground truth, optionally rendering a report bundle),
and ``loss`` (the region-weighted reconstruction loss on tensor files).

Standard output carries one JSON object per line for machine consumption;
human-readable summaries go to standard error. Exit codes are stable API:
0 success, 2 usage/input problems, 3 no target found, 4 service failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .clients import MockDetector, MockVlm, RemoteDetector, RemoteVlm, offline_forced
from .config import CliConfig, config_to_dict, load_config
from .errors import (
    AnchorFrameError,
    NoTargetFoundError,
    ProtocolError,
    ServiceUnavailableError,
)
from .geometry import BoundingBox
from .image_io import read_sequence, write_sequence
from .pipeline import (
    UserBoxOverride,
    propagate_masks,
    read_result,
    read_tube,
    select_keyframe,
    write_result,
)
from .scoring import region_weighted_mse
from .synth import (
    evaluate_selection,
    evaluate_tube,
    generate_scene,
    read_scene_spec,
    read_truth,
    scene_spec_to_dict,
    write_truth,
)
from .tensorio import read_tensor

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_TARGET = 3
EXIT_SERVICE = 4


def _emit(doc: dict) -> None:
    print(json.dumps(doc, sort_keys=True))


def _info(message: str) -> None:
    print(message, file=sys.stderr)


def _parse_bbox(spec: str) -> UserBoxOverride:
    try:
        frame_part, coords_part = spec.split(":", 1)
        coords = [float(v) for v in coords_part.split(",")]
        if len(coords) != 4:
            raise ValueError("expected four coordinates")
        return UserBoxOverride(int(frame_part), BoundingBox(*coords))
    except (ValueError, AnchorFrameError) as exc:
        raise argparse.ArgumentTypeError(
            f"--bbox expects t:x1,y1,x2,y2 with x1<x2 and y1<y2, got {spec!r} ({exc})"
        ) from None


def _build_clients(cfg: CliConfig, truth):
    backend = "mock" if offline_forced() else cfg.backend
    if backend == "mock":
        if truth is None:
            raise AnchorFrameError(
                "mock backends need a ground-truth sidecar; pass --truth or place "
                "truth.json next to the frames"
            )
        detector = MockDetector(
            truth,
            jitter=cfg.detector.jitter,
            score_noise=cfg.detector.score_noise,
            visibility_threshold=cfg.detector.visibility_threshold,
            seed=cfg.seed,
        )
        return detector, MockVlm(truth)
    return RemoteDetector(cfg.detector.endpoint()), RemoteVlm(cfg.vlm.endpoint())


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = read_scene_spec(args.spec)
    video, truth = generate_scene(spec)  # fully rendered before any file is written
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sequence(video, out)
    write_truth(out / "truth.json", truth)
    (out / "scene.json").write_text(
        json.dumps(scene_spec_to_dict(spec), indent=2, sort_keys=True), "utf-8"
    )
    _emit({"name": spec.name, "num_frames": spec.num_frames, "width": spec.width,
           "height": spec.height, "out": str(out)})
    _info(f"rendered scene '{spec.name}': {spec.num_frames} frames at "
          f"{spec.width}x{spec.height} -> {out}")
    return EXIT_OK


def _cmd_select(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    video = read_sequence(args.frames)
    truth = None
    truth_path = Path(args.truth) if args.truth else Path(args.frames) / "truth.json"
    if truth_path.exists():
        truth = read_truth(truth_path)
    detector, vlm = _build_clients(cfg, truth)

    result = select_keyframe(
        video, args.prompt, cfg.selector, detector, vlm, cfg.tracker, override=args.bbox
    )
    tube = propagate_masks(video, result.k_star, result.box, cfg.tracker)

    best = next(c for c in result.candidates if c.frame == result.k_star)
    if args.out:
        write_result(result, tube, args.out, config=config_to_dict(cfg))
        _info(f"wrote result.json, tube.json and {len(tube)} masks to {args.out}")
    _emit({"k_star": result.k_star, "s_final": best.s_final})
    _info(
        f"keyframe {result.k_star} (final score {best.s_final:.4f}, "
        f"{len(result.candidates)} candidates scored)"
    )
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    truth = read_truth(args.truth)
    result = read_result(Path(args.result) / "result.json")
    tube = read_tube(args.result, with_masks=False)
    selection = evaluate_selection(result, truth)
    tube_report = evaluate_tube(tube, truth, args.visibility_floor)
    doc = {
        "kf_visibility": selection.kf_visibility,
        "kf_attr_visibility": selection.kf_attr_visibility,
        "is_complete": selection.is_complete,
        "mean_iou": tube_report.mean_iou,
        "num_scored_frames": tube_report.num_scored_frames,
    }
    if args.report:
        from .report import write_report  # matplotlib import deferred to the report path

        paths = write_report(args.report, result, tube, truth, tube_report)
        _info("report files: " + ", ".join(str(p) for p in paths))
    _emit(doc)
    _info(
        f"keyframe visibility {selection.kf_visibility:.3f}, tube mean IoU "
        f"{'n/a' if tube_report.mean_iou is None else f'{tube_report.mean_iou:.3f}'} "
        f"over {tube_report.num_scored_frames} frames"
    )
    return EXIT_OK


def _cmd_loss(args: argparse.Namespace) -> int:
    pred = read_tensor(args.pred)
    target = read_tensor(args.target)
    mask = read_tensor(args.mask)
    loss = region_weighted_mse(pred, target, mask, args.gamma)
    _emit({"loss": loss})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anchorframe",
        description="Occlusion-aware keyframe selection and mask-tube propagation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="render a synthetic scene with ground truth")
    p_synth.add_argument("--spec", required=True, help="scene.json specification")
    p_synth.add_argument("--out", required=True, help="output directory for frames + sidecars")
    p_synth.set_defaults(func=_cmd_synth)

    p_select = sub.add_parser("select", help="select a keyframe and propagate its mask tube")
    p_select.add_argument("--frames", required=True, help="directory of frame_%%06d.pgm|ppm")
    p_select.add_argument("--prompt", required=True, help="edit instruction text")
    p_select.add_argument("--config", default=None, help="JSON config file")
    p_select.add_argument("--bbox", type=_parse_bbox, default=None,
                          help="user box override as t:x1,y1,x2,y2")
    p_select.add_argument("--out", default=None,
                          help="directory for result.json / tube.json / masks")
    p_select.add_argument("--truth", default=None,
                          help="ground-truth sidecar for mock backends "
                               "(default: <frames>/truth.json)")
    p_select.set_defaults(func=_cmd_select)

    p_eval = sub.add_parser("eval", help="evaluate a selection run against ground truth")
    p_eval.add_argument("--result", required=True, help="directory written by select --out")
    p_eval.add_argument("--truth", required=True, help="truth.json of the scene")
    p_eval.add_argument("--visibility-floor", type=float, default=0.8,
                        help="minimum ground-truth visibility for tube IoU scoring")
    p_eval.add_argument("--report", default=None,
                        help="directory for the CSV + figure report bundle")
    p_eval.set_defaults(func=_cmd_eval)

    p_loss = sub.add_parser("loss", help="region-weighted reconstruction loss on tensors")
    p_loss.add_argument("--pred", required=True, help="AFT1 tensor file")
    p_loss.add_argument("--target", required=True, help="AFT1 tensor file")
    p_loss.add_argument("--mask", required=True, help="AFT1 binary mask tensor file")
    p_loss.add_argument("--gamma", type=float, required=True,
                        help="foreground supervision weight (>= 0)")
    p_loss.set_defaults(func=_cmd_loss)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NoTargetFoundError as exc:
        _info(f"error: {exc}")
        return EXIT_NO_TARGET
    except (ServiceUnavailableError, ProtocolError) as exc:
        _info(f"error: {exc}")
        return EXIT_SERVICE
    except (AnchorFrameError, ValueError) as exc:
        _info(f"error: {exc}")
        return EXIT_INPUT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
