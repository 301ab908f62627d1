"""Selection pipeline and mask-tube propagation, end to end over synthetic
scenes with mock backends plus controlled stub clients."""

import json

import numpy as np
import pytest

from anchorframe.clients import Detection, MockDetector, MockVlm
from anchorframe.errors import (
    DegenerateBoxError,
    InputError,
    NoTargetFoundError,
    UnparseablePromptError,
)
from anchorframe.geometry import BoundingBox, iou
from anchorframe.image_io import Frame, VideoSequence
from anchorframe.pipeline import (
    UserBoxOverride,
    propagate_masks,
    propose_candidates,
    rasterize_box,
    read_result,
    read_tube,
    result_from_dict,
    result_to_dict,
    select_keyframe,
    write_result,
)
from anchorframe.scoring import SelectorConfig, parse_prompt
from anchorframe.synth import (
    OccluderSpec,
    PathSpec,
    SceneSpec,
    TargetSpec,
    canonical_corpus,
    generate_scene,
)
from anchorframe.tracker import TrackerConfig

CORPUS = {s.name: s for s in canonical_corpus()}


class StubDetector:
    """Scripted per-frame detections."""

    def __init__(self, per_frame):
        self.per_frame = per_frame

    def detect_boxes(self, frame, object_prompt, *, frame_index=None):
        return self.per_frame.get(frame_index, [])


class StubVlm:
    def __init__(self, scores=None, default=1.0):
        self.scores = scores or {}
        self.default = default

    def attribute_visibility(self, crop, attribute, *, frame_index=None, crop_box=None):
        return self.scores.get(frame_index, self.default)


def static_video(n=8, w=128, h=96, seed=3):
    rng = np.random.default_rng(seed)
    frame = Frame(rng.integers(0, 256, (h, w, 3), dtype=np.uint8))
    return VideoSequence((frame,) * n)


class TestProposeCandidates:
    def test_fewer_than_m_returns_all(self):
        video = static_video(8)
        det = StubDetector({
            1: [Detection(BoundingBox(30, 30, 60, 60), 0.9)],
            4: [Detection(BoundingBox(30, 30, 60, 60), 0.8)],
            6: [Detection(BoundingBox(30, 30, 60, 60), 0.7)],
        })
        prompt = parse_prompt("remove the dog")
        got = propose_candidates(video, prompt, det, SelectorConfig())
        assert [p.frame for p in got] == [1, 4, 6]

    def test_top_m_cut_and_tie_order(self):
        video = static_video(10)
        box = BoundingBox(30, 30, 60, 60)
        det = StubDetector({t: [Detection(box, 0.9)] for t in range(10)})
        got = propose_candidates(video, parse_prompt("remove the dog"), det,
                                 SelectorConfig(top_m=4))
        assert [p.frame for p in got] == [0, 1, 2, 3]  # equal scores: lowest frames

    def test_border_touching_frame_excluded(self):
        video = static_video(4)
        det = StubDetector({
            0: [Detection(BoundingBox(0, 30, 40, 60), 0.9)],  # touches left edge
            1: [Detection(BoundingBox(30, 30, 60, 60), 0.5)],
        })
        got = propose_candidates(video, parse_prompt("remove the dog"), det, SelectorConfig())
        assert [p.frame for p in got] == [1]

    def test_spatial_prior_reduces_text_score(self):
        video = static_video(2)
        left_box = BoundingBox(10, 30, 40, 60)
        right_box = BoundingBox(88, 30, 118, 60)
        det = StubDetector({0: [Detection(right_box, 0.9), Detection(left_box, 0.6)]})
        prompt = parse_prompt("make the left car blue")
        got = propose_candidates(video, prompt, det, SelectorConfig())
        # 0.6 * 1.0 beats 0.9 * 0.25 once the left prior applies
        assert got[0].box == left_box
        assert got[0].s_text == pytest.approx(0.6)

    def test_no_detections_anywhere_raises(self):
        video = static_video(3)
        with pytest.raises(NoTargetFoundError):
            propose_candidates(video, parse_prompt("remove the dog"), StubDetector({}),
                               SelectorConfig())

    def test_all_zero_scores_raise_named_error(self):
        video = static_video(2)
        det = StubDetector({0: [Detection(BoundingBox(0, 30, 40, 60), 0.9)]})
        with pytest.raises(NoTargetFoundError, match="zero"):
            propose_candidates(video, parse_prompt("remove the dog"), det, SelectorConfig())

    def test_occluded_interval_has_no_candidates(self):
        spec = CORPUS["occ_static_mid"]
        video, truth = generate_scene(spec)
        det = MockDetector(truth)
        got = propose_candidates(video, parse_prompt("remove the box"), det,
                                 SelectorConfig(top_m=81))
        frames = {p.frame for p in got}
        for t, ft in enumerate(truth.frames):
            if ft.visibility < 0.25:
                assert t not in frames


class TestSelectKeyframe:
    def test_single_frame_video_defaults_cycle_to_one(self):
        video = static_video(1)
        det = StubDetector({0: [Detection(BoundingBox(30, 30, 60, 60), 0.9)]})
        result = select_keyframe(video, "remove the dog", SelectorConfig(), det, StubVlm())
        assert result.k_star == 0
        assert result.candidates[0].s_cyc == 1.0

    def test_exact_tie_breaks_to_lowest_frame(self):
        video = static_video(8)
        box = BoundingBox(30, 30, 60, 60)
        det = StubDetector({t: [Detection(box, 0.9)] for t in (2, 5)})
        result = select_keyframe(video, "remove the dog", SelectorConfig(), det, StubVlm())
        by_frame = {c.frame: c for c in result.candidates}
        assert by_frame[2].s_final == by_frame[5].s_final
        assert result.k_star == 2

    def test_winner_has_maximal_final_score(self):
        spec = CORPUS["occ_sweep_mid"]
        video, truth = generate_scene(spec)
        result = select_keyframe(video, "remove the box", SelectorConfig(),
                                 MockDetector(truth), MockVlm(truth))
        best = max(c.s_final for c in result.candidates)
        chosen = next(c for c in result.candidates if c.frame == result.k_star)
        assert chosen.s_final == best

    def test_candidates_sorted_by_frame_for_audit(self):
        spec = CORPUS["linear_slow"]
        video, truth = generate_scene(spec)
        result = select_keyframe(video, "remove the box", SelectorConfig(),
                                 MockDetector(truth), MockVlm(truth))
        frames = [c.frame for c in result.candidates]
        assert frames == sorted(frames)

    def test_unparseable_prompt_propagates(self):
        video = static_video(2)
        with pytest.raises(UnparseablePromptError):
            select_keyframe(video, "the", SelectorConfig(), StubDetector({}), StubVlm())

    def test_keyframe_lands_after_exposure_popout(self):
        # The video opens fully occluded; candidates only exist once the
        # occluder expires, so the winner must be a fully visible frame.
        spec = CORPUS["occ_early_from0"]
        video, truth = generate_scene(spec)
        result = select_keyframe(video, "remove the box", SelectorConfig(),
                                 MockDetector(truth), MockVlm(truth))
        first_visible = next(t for t, ft in enumerate(truth.frames) if ft.visibility >= 0.25)
        assert result.k_star >= first_visible
        assert truth.frames[result.k_star].visibility == 1.0
        assert truth.frames[result.k_star].attribute_visibility == 1.0

    def test_attribute_term_steers_selection_window(self):
        # A small solid occluder rides the target covering exactly the
        # attribute patch until frame 39; with the candidate pool widened to
        # the whole video, only patch-exposed frames can win the final score.
        spec = SceneSpec(
            name="patch_window", width=320, height=240, num_frames=81, seed=77,
            background="checker",
            target=TargetSpec(size=(44, 34), texture="noise",
                              path=PathSpec("static", (160.0, 120.0)),
                              attribute_patch=(0.3, 0.25, 0.75, 0.7)),
            occluder=OccluderSpec(size=(24, 20), texture="checker", cell=25,
                                  path=PathSpec("static", (161.0, 119.5)),
                                  active_interval=(0, 39)),
        )
        video, truth = generate_scene(spec)
        hidden = [t for t, ft in enumerate(truth.frames) if ft.attribute_visibility == 0.0]
        exposed = [t for t, ft in enumerate(truth.frames) if ft.attribute_visibility == 1.0]
        assert hidden and exposed  # the scene really is discriminative
        result = select_keyframe(video, "change the red patch on the box",
                                 SelectorConfig(top_m=81),
                                 MockDetector(truth), MockVlm(truth))
        assert result.k_star in exposed

    def test_override_replaces_detector_entry(self):
        video = static_video(6)
        det_box = BoundingBox(30, 30, 60, 60)
        det = StubDetector({t: [Detection(det_box, 0.9)] for t in range(6)})
        user_box = BoundingBox(40, 40, 70, 70)
        result = select_keyframe(video, "remove the dog", SelectorConfig(),
                                 det, StubVlm(), override=UserBoxOverride(2, user_box))
        entry = next(c for c in result.candidates if c.frame == 2)
        assert entry.box == user_box
        assert entry.s_text == 1.0
        assert sum(1 for c in result.candidates if c.frame == 2) == 1

    def test_override_works_without_any_detection(self):
        video = static_video(5)
        result = select_keyframe(video, "remove the dog", SelectorConfig(),
                                 StubDetector({}), StubVlm(),
                                 override=UserBoxOverride(3, BoundingBox(30, 30, 70, 70)))
        assert result.k_star == 3
        assert len(result.candidates) == 1

    def test_override_dominates_when_only_base_term_counts(self):
        # Detector confidence 0.9 everywhere vs the override's implicit 1.0:
        # with the cycle/attribute weights zeroed the override must win.
        spec = CORPUS["static_center"]
        video, truth = generate_scene(spec)
        det = MockDetector(truth, score_noise=0.1)
        cfg = SelectorConfig(lambda_b=0.5, lambda_c=0.0, lambda_p=0.0)
        override = UserBoxOverride(3, truth.frames[3].box)
        result = select_keyframe(video, "remove the box", cfg, det, MockVlm(truth),
                                 override=override)
        assert result.k_star == 3
        chosen = next(c for c in result.candidates if c.frame == 3)
        assert all(chosen.s_final >= c.s_final for c in result.candidates)

    def test_override_frame_out_of_range(self):
        video = static_video(3)
        with pytest.raises(InputError):
            select_keyframe(video, "remove the dog", SelectorConfig(), StubDetector({}),
                            StubVlm(), override=UserBoxOverride(9, BoundingBox(0, 0, 5, 5)))


class TestPropagateMasks:
    def test_static_scene_masks_match_keyframe(self):
        spec = CORPUS["static_center"]
        video, truth = generate_scene(spec)
        box = truth.frames[40].box
        tube = propagate_masks(video, 40, box, TrackerConfig())
        assert len(tube) == len(video)
        key_mask = tube.entries[40].mask
        for entry in tube.entries:
            assert iou(entry.box, box) > 0.9
            assert entry.mask == key_mask

    def test_keyframe_zero_has_empty_backward_segment(self):
        video = static_video(5)
        tube = propagate_masks(video, 0, BoundingBox(30, 30, 60, 60))
        assert len(tube) == 5
        assert [e.frame for e in tube.entries] == [0, 1, 2, 3, 4]
        assert not tube.entries[0].occluded

    def test_degenerate_box_rejected(self):
        video = static_video(3)
        with pytest.raises(DegenerateBoxError):
            propagate_masks(video, 1, BoundingBox(500, 500, 600, 600))

    def test_density_includes_occlusion(self):
        spec = CORPUS["occ_static_mid"]
        video, truth = generate_scene(spec)
        tube = propagate_masks(video, 0, truth.frames[0].box)
        assert len(tube) == len(video)
        assert [e.frame for e in tube.entries] == list(range(len(video)))


class TestRasterizeBox:
    def test_rounding_rule_covers_box(self):
        mask = rasterize_box(BoundingBox(1.2, 2.7, 3.4, 4.1), 8, 8)
        expected = np.zeros((8, 8), dtype=np.uint8)
        expected[2:5, 1:4] = 255  # y floor 2 .. ceil 4.1 = 5, x floor 1 .. ceil 3.4 = 4
        assert np.array_equal(mask.pixels, expected)

    def test_integer_box_exact(self):
        mask = rasterize_box(BoundingBox(2, 3, 5, 6), 8, 8)
        assert mask.pixels.sum() == 255 * 9

    def test_values_are_binary(self):
        mask = rasterize_box(BoundingBox(0.5, 0.5, 6.5, 6.5), 8, 8)
        assert set(np.unique(mask.pixels)) == {0, 255}


class TestWriteResult:
    @pytest.fixture()
    def small_run(self):
        spec = SceneSpec(
            name="small", width=120, height=90, num_frames=7, seed=9,
            background="checker",
            target=TargetSpec(size=(24, 18), texture="noise",
                              path=PathSpec("static", (60.0, 45.0)),
                              attribute_patch=(0.25, 0.25, 0.75, 0.75)),
        )
        video, truth = generate_scene(spec)
        result = select_keyframe(video, "remove the box", SelectorConfig(),
                                 MockDetector(truth), MockVlm(truth))
        tube = propagate_masks(video, result.k_star, result.box)
        return result, tube

    def test_files_written_and_manifest(self, small_run, tmp_path):
        result, tube = small_run
        manifest = write_result(result, tube, tmp_path, config={"backend": "mock"})
        names = {f["path"] for f in manifest["files"]}
        assert "result.json" in names and "tube.json" in names
        assert sum(1 for n in names if n.startswith("masks/")) == 7
        assert all(f["size"] > 0 for f in manifest["files"])
        assert (tmp_path / "manifest.json").exists()

    def test_result_roundtrip_equality(self, small_run, tmp_path):
        result, tube = small_run
        write_result(result, tube, tmp_path)
        assert read_result(tmp_path / "result.json") == result

    def test_result_json_schema_keys(self, small_run, tmp_path):
        result, tube = small_run
        write_result(result, tube, tmp_path, config={"seed": 0})
        doc = json.loads((tmp_path / "result.json").read_text())
        assert set(doc) == {"k_star", "box", "prompt", "candidates", "config"}
        assert set(doc["prompt"]) == {"raw", "object", "spatial", "attribute"}
        for c in doc["candidates"]:
            assert set(c) == {"frame", "box", "s_text", "s_comp", "s_base",
                              "s_cyc", "s_attr", "s_final"}
            assert len(c["box"]) == 4

    def test_tube_roundtrip(self, small_run, tmp_path):
        result, tube = small_run
        write_result(result, tube, tmp_path)
        back = read_tube(tmp_path)
        assert len(back) == len(tube)
        for a, b in zip(back.entries, tube.entries):
            assert (a.frame, a.box, a.occluded) == (b.frame, b.box, b.occluded)
            assert a.mask == b.mask

    def test_dict_roundtrip_without_disk(self, small_run):
        result, _ = small_run
        assert result_from_dict(result_to_dict(result)) == result

    def test_creates_missing_directory(self, small_run, tmp_path):
        result, tube = small_run
        target = tmp_path / "deep" / "nested"
        write_result(result, tube, target)
        assert (target / "result.json").exists()
