"""Correlation tracker: kernel closed forms, shift recovery, model
interpolation, segment tracking, and occlusion signaling."""

import numpy as np
import pytest

from anchorframe.errors import ConfigError, DegenerateBoxError
from anchorframe.geometry import BoundingBox
from anchorframe.image_io import Frame, VideoSequence
from anchorframe.tracker import (
    TrackerConfig,
    detect,
    gaussian_kernel_correlation,
    track_segment,
    train,
    update,
)


def noise_frame(shape, seed):
    rng = np.random.default_rng(seed)
    return Frame(rng.integers(0, 256, shape, dtype=np.uint8))


def zero_mean_noise(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, n))
    return x - x.mean()


class TestGaussianKernelCorrelation:
    def test_self_correlation_is_one_at_zero_shift(self):
        x = zero_mean_noise(16, 1)
        k = gaussian_kernel_correlation(x, x, 0.5)
        assert k[0, 0] == pytest.approx(1.0, abs=1e-12)
        assert k.max() == pytest.approx(1.0, abs=1e-12)

    def test_cyclic_shift_moves_argmax(self):
        x = zero_mean_noise(16, 2)
        for dy, dx in [(3, 5), (0, 7), (12, 1)]:
            z = np.roll(np.roll(x, dy, axis=0), dx, axis=1)
            k = gaussian_kernel_correlation(x, z, 0.5)
            assert np.unravel_index(k.argmax(), k.shape) == (dy, dx)

    def test_negated_input_closed_form(self):
        # |x|^2 + |-x|^2 - 2*corr(x,-x)(0) = 4|x|^2 for zero-mean x
        x = zero_mean_noise(16, 3)
        sigma = 0.5
        k = gaussian_kernel_correlation(x, -x, sigma)
        expected = np.exp(-4.0 * np.sum(x * x) / (sigma * sigma * x.size))
        assert k[0, 0] == pytest.approx(expected, rel=1e-10)

    def test_nonpositive_sigma_rejected(self):
        x = zero_mean_noise(8, 4)
        with pytest.raises(ConfigError):
            gaussian_kernel_correlation(x, x, 0.0)


class TestTrackerConfig:
    def test_defaults_valid(self):
        cfg = TrackerConfig()
        assert cfg.template_size == 64
        assert cfg.psr_occlusion_threshold == 5.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"template_size": 48},
            {"template_size": 0},
            {"padding": 1.0},
            {"ridge_lambda": 0.0},
            {"interp_factor": 1.5},
            {"kernel_sigma": -1.0},
            {"target_sigma_factor": 0.0},
        ],
    )
    def test_invalid_values_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            TrackerConfig(**kwargs)


class TestTrainDetect:
    def test_self_detection_keeps_center(self):
        frame = noise_frame((120, 160, 3), 10)
        box = BoundingBox(60, 40, 100, 80)
        state = train(frame, box)
        step = detect(state, frame)
        cx0, cy0 = box.center
        cx1, cy1 = step.box.center
        assert abs(cx1 - cx0) <= 0.5 and abs(cy1 - cy0) <= 0.5
        assert not step.occluded

    def test_constant_frame_trains_but_scores_flat(self):
        flat = Frame(np.full((100, 100), 128, dtype=np.uint8))
        state = train(flat, BoundingBox(30, 30, 70, 70))
        flat_psr = detect(state, flat).psr

        textured = noise_frame((100, 100), 11)
        state2 = train(textured, BoundingBox(30, 30, 70, 70))
        textured_psr = detect(state2, textured).psr
        assert flat_psr < textured_psr

    def test_degenerate_box_rejected(self):
        frame = noise_frame((50, 50), 12)
        with pytest.raises(DegenerateBoxError):
            train(frame, BoundingBox(200, 200, 240, 240))

    def test_integer_shift_recovery_spot_checks(self):
        # pure-cyclic construction: the padded window spans the whole frame
        base = np.random.default_rng(42).integers(0, 256, (128, 128), dtype=np.uint8)
        cfg = TrackerConfig(template_size=128, padding=2.0)
        box = BoundingBox(32, 32, 96, 96)
        state = train(Frame(base), box, cfg)
        for dy, dx in [(0, 0), (5, -3), (-16, 16), (16, 16), (-11, -16), (7, 12)]:
            shifted = Frame(np.roll(np.roll(base, dy, axis=0), dx, axis=1))
            state.current_box = box
            step = detect(state, shifted)
            assert (step.box.x1 - box.x1, step.box.y1 - box.y1) == (dx, dy)

    def test_occluded_target_scores_below_visible(self):
        rng = np.random.default_rng(13)
        background = rng.integers(0, 256, (120, 120), dtype=np.uint8)
        target = rng.integers(0, 256, (30, 30), dtype=np.uint8)
        visible = background.copy()
        visible[40:70, 40:70] = target
        occluded = background.copy()  # target region replaced by background

        box = BoundingBox(40, 40, 70, 70)
        state = train(Frame(visible), box)
        psr_visible = detect(state, Frame(visible)).psr
        state.current_box = box
        psr_occluded = detect(state, Frame(occluded)).psr
        assert psr_occluded < psr_visible


class TestUpdate:
    def _state_pair(self):
        frame_a = noise_frame((90, 90), 20)
        frame_b = noise_frame((90, 90), 21)
        box = BoundingBox(25, 25, 65, 65)
        return frame_a, frame_b, box

    def test_zero_interp_is_identity(self):
        frame_a, frame_b, box = self._state_pair()
        cfg = TrackerConfig(interp_factor=0.0)
        state = train(frame_a, box, cfg)
        alpha_before = state.alpha_spectrum.copy()
        template_before = state.template.copy()
        update(state, frame_b, cfg)
        assert np.array_equal(state.alpha_spectrum, alpha_before)
        assert np.array_equal(state.template, template_before)

    def test_full_interp_equals_fresh_train(self):
        frame_a, frame_b, box = self._state_pair()
        cfg = TrackerConfig(interp_factor=1.0)
        state = train(frame_a, box, cfg)
        update(state, frame_b, cfg)
        fresh = train(frame_b, state.current_box, cfg)
        assert np.array_equal(state.alpha_spectrum, fresh.alpha_spectrum)
        assert np.array_equal(state.template, fresh.template)

    def test_half_interp_is_elementwise_mean(self):
        frame_a, frame_b, box = self._state_pair()
        cfg = TrackerConfig(interp_factor=0.5)
        state = train(frame_a, box, cfg)
        update(state, frame_b, cfg)
        pure_a = train(frame_a, box, cfg)
        pure_b = train(frame_b, box, cfg)
        assert np.allclose(state.alpha_spectrum,
                           0.5 * pure_a.alpha_spectrum + 0.5 * pure_b.alpha_spectrum,
                           atol=0, rtol=0)
        assert np.allclose(state.template, 0.5 * pure_a.template + 0.5 * pure_b.template,
                           atol=0, rtol=0)


class TestTrackSegment:
    def test_zero_steps_yields_empty(self):
        video = VideoSequence((noise_frame((50, 50), 30),) * 3)
        assert track_segment(video, 0, BoundingBox(10, 10, 30, 30), "forward", 0) == []

    def test_backward_from_start_truncates_to_empty(self):
        video = VideoSequence((noise_frame((50, 50), 31),) * 4)
        assert track_segment(video, 0, BoundingBox(10, 10, 30, 30), "backward", 5) == []

    def test_forward_truncates_at_end(self):
        video = VideoSequence((noise_frame((60, 60), 32),) * 4)
        steps = track_segment(video, 2, BoundingBox(15, 15, 45, 45), "forward", 10)
        assert len(steps) == 1

    def test_static_scene_stays_put(self):
        frame = noise_frame((80, 100, 3), 33)
        video = VideoSequence((frame,) * 6)
        box = BoundingBox(30, 20, 70, 60)
        steps = track_segment(video, 0, box, "forward", 5)
        assert len(steps) == 5
        for step in steps:
            assert abs(step.box.x1 - box.x1) <= 0.5
            assert abs(step.box.y1 - box.y1) <= 0.5
            assert not step.occluded

    def test_deterministic_across_runs(self):
        rng = np.random.default_rng(34)
        frames = tuple(Frame(rng.integers(0, 256, (70, 90), dtype=np.uint8)) for _ in range(5))
        video = VideoSequence(frames)
        box = BoundingBox(20, 20, 50, 50)
        a = track_segment(video, 1, box, "forward", 3)
        b = track_segment(video, 1, box, "forward", 3)
        assert a == b

    def test_invalid_direction_rejected(self):
        video = VideoSequence((noise_frame((50, 50), 35),) * 2)
        with pytest.raises(ValueError):
            track_segment(video, 0, BoundingBox(10, 10, 30, 30), "sideways", 1)

    def test_occluded_steps_hold_box(self):
        # Target visible at frame 0, wiped out afterwards: every following
        # step should flag occlusion and keep the box where it was.
        rng = np.random.default_rng(36)
        background = np.full((100, 100), 100, dtype=np.uint8)
        visible = background.copy()
        visible[35:65, 35:65] = rng.integers(0, 256, (30, 30), dtype=np.uint8)
        video = VideoSequence((Frame(visible),) + (Frame(background),) * 3)
        box = BoundingBox(35, 35, 65, 65)
        steps = track_segment(video, 0, box, "forward", 3)
        assert all(s.occluded for s in steps)
        assert all(s.box == box for s in steps)
