"""Kernelized correlation-filter tracking with occlusion flagging.

Single-target translation tracker: ridge regression over all cyclic shifts
of a grayscale template, solved in the Fourier domain with a Gaussian
kernel. The template is the padded target patch resampled to a fixed
power-of-two raster, zero-meaned and tapered by a cosine window; detection
is the regression response at every cyclic shift of the new patch, and the
peak-to-sidelobe ratio of that response is the occlusion / loss-of-track
signal.

Scale is fixed (the box never changes size) and there is no re-detection
after a loss: occluded steps hold the box in place and freeze the model,
which keeps downstream mask tubes dense at the cost of not reacquiring a
target that re-enters elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import ConfigError, ShapeError
from .fft import fft2, ifft2
from .geometry import BoundingBox, clamp_box
from .image_io import Frame, VideoSequence, crop, resize_bilinear, to_grayscale

Direction = Literal["forward", "backward"]

# Sidelobe statistics exclude an 11x11 window centered on the response peak.
_PSR_EXCLUSION_RADIUS = 5


@dataclass(frozen=True)
class TrackerConfig:
    """Correlation-filter hyperparameters.

    template_size must be a power of two; padding is the search-window
    scale relative to the target box; interp_factor is the per-frame model
    interpolation rate (0 freezes the model after init).
    """

    template_size: int = 64
    padding: float = 1.5
    kernel_sigma: float = 0.5
    target_sigma_factor: float = 0.1
    ridge_lambda: float = 1e-4
    interp_factor: float = 0.075
    psr_occlusion_threshold: float = 5.0

    def __post_init__(self) -> None:
        n = self.template_size
        if n < 2 or (n & (n - 1)) != 0:
            raise ConfigError(f"template_size must be a power of two >= 2, got {n}")
        if self.padding <= 1:
            raise ConfigError(f"padding must exceed 1, got {self.padding}")
        if self.kernel_sigma <= 0:
            raise ConfigError(f"kernel_sigma must be positive, got {self.kernel_sigma}")
        if self.target_sigma_factor <= 0:
            raise ConfigError(
                f"target_sigma_factor must be positive, got {self.target_sigma_factor}"
            )
        if self.ridge_lambda <= 0:
            raise ConfigError(f"ridge_lambda must be positive, got {self.ridge_lambda}")
        if not 0.0 <= self.interp_factor <= 1.0:
            raise ConfigError(f"interp_factor must lie in [0, 1], got {self.interp_factor}")


@dataclass
class TrackerState:
    """Mutable single-owner tracker state; never share one instance across
    concurrent calls."""

    config: TrackerConfig
    alpha_spectrum: np.ndarray  # complex (N, N) ridge-regression solution
    template: np.ndarray  # real (N, N) windowed zero-mean features
    current_box: BoundingBox
    window: np.ndarray  # cosine taper, (N, N)
    target_spectrum: np.ndarray  # complex (N, N) spectrum of the regression target


@dataclass(frozen=True)
class TrackStep:
    """One tracked frame: box, response sharpness, and the occlusion flag
    (true exactly when psr fell below the configured threshold)."""

    box: BoundingBox
    psr: float
    occluded: bool


# Pluggable tracking operator: (video, start, start_box, direction, steps)
# -> one TrackStep per visited frame. The KCF implementation below is the
# in-repo default; stubs and other trackers plug in through this signature.
TrackFunction = Callable[[VideoSequence, int, BoundingBox, Direction, int], list[TrackStep]]


def _cosine_window(n: int) -> np.ndarray:
    w = np.hanning(n)
    return np.outer(w, w)


def _gaussian_target(n: int, sigma: float) -> np.ndarray:
    # Peak at zero shift, wrapped so displacement unwrapping stays symmetric.
    d = np.arange(n)
    d = np.minimum(d, n - d).astype(np.float64)
    return np.exp(-(d[:, np.newaxis] ** 2 + d[np.newaxis, :] ** 2) / (2.0 * sigma * sigma))


def _extract_features(frame: Frame, box: BoundingBox, cfg: TrackerConfig,
                      window: np.ndarray) -> np.ndarray:
    cx, cy = box.center
    pw = box.width * cfg.padding
    ph = box.height * cfg.padding
    patch_box = BoundingBox(cx - pw / 2.0, cy - ph / 2.0, cx + pw / 2.0, cy + ph / 2.0)
    patch = crop(frame, patch_box)
    patch = resize_bilinear(patch, cfg.template_size, cfg.template_size)
    gray = to_grayscale(patch).pixels.astype(np.float64) / 255.0
    gray -= gray.mean()
    return gray * window


def gaussian_kernel_correlation(x: np.ndarray, z: np.ndarray, sigma: float) -> np.ndarray:
    """Gaussian kernel between x and every cyclic shift of z.

    k(tau) = exp(-(|x|^2 + |z|^2 - 2*corr(x, z)(tau)) / (sigma^2 * N^2)),
    with the argument clamped at zero before exponentiation and the
    correlation computed through the FFT.
    """
    if sigma <= 0:
        raise ConfigError(f"kernel sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.shape != z.shape:
        raise ShapeError(f"feature shapes differ: {x.shape} vs {z.shape}")
    corr = ifft2(np.conj(fft2(x)) * fft2(z))
    num = (x * x).sum() + (z * z).sum() - 2.0 * corr
    return np.exp(-np.maximum(num, 0.0) / (sigma * sigma * x.size))


def train(frame: Frame, box: BoundingBox, cfg: TrackerConfig = TrackerConfig()) -> TrackerState:
    """Initialize a tracker on one frame.

    The box is clamped into the frame first (fully-outside boxes raise).
    Solves the kernel ridge regression in the Fourier domain:
    alpha_hat = y_hat / (k_hat_xx + lambda).
    """
    n = cfg.template_size
    box = clamp_box(box, frame.width, frame.height)
    window = _cosine_window(n)
    features = _extract_features(frame, box, cfg, window)
    sigma_y = cfg.target_sigma_factor * n / cfg.padding
    target_spectrum = fft2(_gaussian_target(n, sigma_y))
    kxx_spectrum = fft2(gaussian_kernel_correlation(features, features, cfg.kernel_sigma))
    alpha_spectrum = target_spectrum / (kxx_spectrum + cfg.ridge_lambda)
    return TrackerState(
        config=cfg,
        alpha_spectrum=alpha_spectrum,
        template=features,
        current_box=box,
        window=window,
        target_spectrum=target_spectrum,
    )


def _peak_to_sidelobe(response: np.ndarray, py: int, px: int) -> float:
    h, w = response.shape
    dy = np.abs(np.arange(h) - py)
    dy = np.minimum(dy, h - dy)
    dx = np.abs(np.arange(w) - px)
    dx = np.minimum(dx, w - dx)
    exclusion = (dy[:, np.newaxis] <= _PSR_EXCLUSION_RADIUS) & (
        dx[np.newaxis, :] <= _PSR_EXCLUSION_RADIUS
    )
    sidelobe = response[~exclusion]
    if sidelobe.size == 0:
        return 0.0
    std = float(sidelobe.std())
    if std < 1e-12:
        # Flat response: no evidence of a target at all.
        return 0.0
    return float((response[py, px] - sidelobe.mean()) / std)


def _clamp_position(box: BoundingBox, width: int, height: int) -> BoundingBox:
    """Shift the box back inside the frame, preserving its size."""
    w = box.width
    h = box.height
    if w >= width:
        x1, x2 = 0.0, float(width)
    else:
        x1 = min(max(box.x1, 0.0), width - w)
        x2 = x1 + w
    if h >= height:
        y1, y2 = 0.0, float(height)
    else:
        y1 = min(max(box.y1, 0.0), height - h)
        y2 = y1 + h
    return BoundingBox(x1, y1, x2, y2)


def detect(state: TrackerState, frame: Frame) -> TrackStep:
    """Localize the target on a new frame and move state.current_box.

    The response peak is unwrapped (indices past N/2 map to negative
    displacement), scaled from template to search-window pixels, and the
    translated box is clamped inside the frame. Always returns a step;
    reliability is conveyed through psr / occluded.
    """
    cfg = state.config
    n = cfg.template_size
    observed = _extract_features(frame, state.current_box, cfg, state.window)
    kernel = gaussian_kernel_correlation(state.template, observed, cfg.kernel_sigma)
    response = ifft2(state.alpha_spectrum * fft2(kernel))
    py, px = np.unravel_index(int(np.argmax(response)), response.shape)
    psr = _peak_to_sidelobe(response, int(py), int(px))
    dy = int(py) - n if py > n // 2 else int(py)
    dx = int(px) - n if px > n // 2 else int(px)
    scale_x = state.current_box.width * cfg.padding / n
    scale_y = state.current_box.height * cfg.padding / n
    moved = state.current_box.translated(dx * scale_x, dy * scale_y)
    moved = _clamp_position(moved, frame.width, frame.height)
    state.current_box = moved
    return TrackStep(box=moved, psr=psr, occluded=psr < cfg.psr_occlusion_threshold)


def update(state: TrackerState, frame: Frame, cfg: TrackerConfig) -> TrackerState:
    """Interpolate the model toward a fresh fit at the current box.

    new = (1 - interp_factor) * old + interp_factor * trained(current_box).
    interp_factor 0 leaves the model untouched; 1 replaces it outright.
    """
    rate = cfg.interp_factor
    if rate == 0.0:
        return state
    fresh = train(frame, state.current_box, cfg)
    if rate == 1.0:
        state.alpha_spectrum = fresh.alpha_spectrum
        state.template = fresh.template
    else:
        state.alpha_spectrum = (1.0 - rate) * state.alpha_spectrum + rate * fresh.alpha_spectrum
        state.template = (1.0 - rate) * state.template + rate * fresh.template
    return state


def track_segment(
    video: VideoSequence,
    start: int,
    start_box: BoundingBox,
    direction: Direction,
    steps: int,
    cfg: TrackerConfig = TrackerConfig(),
) -> list[TrackStep]:
    """Track from a fresh init at (start, start_box), one step per frame.

    Emits one TrackStep per visited frame (the start frame excluded); the
    step count is silently truncated at the sequence boundary, so the
    returned length reports how many steps actually ran. Steps flagged
    occluded hold the box at its previous position and skip the model
    update, so a transient occluder cannot corrupt the filter.
    """
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    if not 0 <= start < len(video):
        raise ValueError(f"start frame {start} outside sequence of length {len(video)}")
    if direction == "forward":
        indices = range(start + 1, min(start + steps, len(video) - 1) + 1)
    elif direction == "backward":
        indices = range(start - 1, max(start - steps, 0) - 1, -1)
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")

    out: list[TrackStep] = []
    if not indices:
        return out
    state = train(video[start], start_box, cfg)
    for t in indices:
        frame = video[t]
        held = state.current_box
        step = detect(state, frame)
        if step.occluded:
            state.current_box = held
            step = TrackStep(box=held, psr=step.psr, occluded=True)
        else:
            update(state, frame, cfg)
        out.append(step)
    return out


def make_track_fn(cfg: TrackerConfig) -> TrackFunction:
    """Bind a TrackerConfig into the pluggable track-function signature."""

    def _run(video: VideoSequence, start: int, box: BoundingBox,
             direction: Direction, steps: int) -> list[TrackStep]:
        return track_segment(video, start, box, direction, steps, cfg)

    return _run
