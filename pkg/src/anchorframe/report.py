"""Evaluation report rendering: per-frame CSV plus matplotlib figures.

Figures are written straight to files (Agg backend, no display). The CSV is
the machine-friendly delimited companion of the plots: one row per frame
with IoU, ground-truth visibility and the occlusion flag.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .pipeline import KeyframeResult, MaskTube
from .synth import GroundTruth, TubeReport


def write_per_frame_csv(path: str | Path, tube: MaskTube, truth: GroundTruth,
                        report: TubeReport) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "iou", "visibility", "attribute_visibility", "occluded"])
        for entry, ft, iou_value in zip(tube.entries, truth.frames, report.per_frame_iou):
            writer.writerow(
                [entry.frame, f"{iou_value:.6f}", f"{ft.visibility:.6f}",
                 f"{ft.attribute_visibility:.6f}", int(entry.occluded)]
            )


def plot_tube(path: str | Path, tube: MaskTube, truth: GroundTruth,
              report: TubeReport) -> None:
    frames = [e.frame for e in tube.entries]
    fig, ax = plt.subplots(figsize=(8, 3.2))
    ax.plot(frames, report.per_frame_iou, label="tube IoU", color="tab:blue", lw=1.4)
    ax.plot(frames, [ft.visibility for ft in truth.frames], label="visibility",
            color="tab:green", lw=1.0, ls="--")
    occluded = [e.frame for e in tube.entries if e.occluded]
    for f in occluded:
        ax.axvspan(f - 0.5, f + 0.5, color="tab:red", alpha=0.08, lw=0)
    if occluded:
        ax.plot([], [], color="tab:red", alpha=0.3, lw=6, label="flagged occluded")
    ax.set_xlabel("frame")
    ax.set_ylabel("score")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="lower left", fontsize=8)
    ax.set_title("Mask tube vs ground truth")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_candidates(path: str | Path, result: KeyframeResult) -> None:
    frames = [c.frame for c in result.candidates]
    width = 0.22
    fig, ax = plt.subplots(figsize=(8, 3.2))
    xs = range(len(frames))
    ax.bar([x - width for x in xs], [c.s_base for c in result.candidates], width,
           label="base", color="tab:gray")
    ax.bar(list(xs), [c.s_cyc for c in result.candidates], width,
           label="cycle", color="tab:blue")
    ax.bar([x + width for x in xs], [c.s_attr for c in result.candidates], width,
           label="attribute", color="tab:green")
    ax.plot(list(xs), [c.s_final for c in result.candidates], "o-", color="tab:red",
            label="final", lw=1.2, ms=4)
    for x, c in zip(xs, result.candidates):
        if c.frame == result.k_star:
            ax.axvline(x, color="tab:red", alpha=0.25, lw=8)
    ax.set_xticks(list(xs))
    ax.set_xticklabels([str(f) for f in frames])
    ax.set_xlabel("candidate frame")
    ax.set_ylabel("score")
    ax.legend(loc="lower left", fontsize=8, ncol=4)
    ax.set_title(f"Candidate scores (keyframe {result.k_star})")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def write_report(out_dir: str | Path, result: KeyframeResult, tube: MaskTube,
                 truth: GroundTruth, report: TubeReport) -> list[Path]:
    """Render the full report bundle into out_dir and return the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "per_frame.csv"
    write_per_frame_csv(csv_path, tube, truth, report)
    tube_png = out / "tube_iou.png"
    plot_tube(tube_png, tube, truth, report)
    scores_png = out / "candidate_scores.png"
    plot_candidates(scores_png, result)
    return [csv_path, tube_png, scores_png]
