"""Frame containers and bit-exact binary netpbm (PGM/PPM) codecs.

The canonical on-disk raster format everywhere in this package is binary
netpbm with maxval 255: single-channel ``P5`` or three-channel ``P6``. Frame
sequences live in a directory of zero-padded files ``frame_000000.pgm|ppm``
contiguous from index 0. Masks are written as PGM with 255 inside, 0 outside.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateBoxError, InputError, NetpbmParseError
from .geometry import BoundingBox, round_half_up

_WHITESPACE = b" \t\r\n\x0b\x0c"

# ITU-R 601 luma weights, rounded half-up for cross-platform determinism.
_GRAY_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True, eq=False)
class Frame:
    """Immutable 8-bit raster image, grayscale (h, w) or RGB (h, w, 3)."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.dtype != np.uint8:
            raise ValueError(f"frame pixels must be uint8, got {arr.dtype}")
        if arr.ndim == 2:
            pass
        elif arr.ndim == 3 and arr.shape[2] == 3:
            pass
        else:
            raise ValueError(f"frame must be (h, w) or (h, w, 3), got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"frame must be at least 1x1, got shape {arr.shape}")
        if arr.flags.writeable:
            arr = arr.copy()
            arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )


@dataclass(frozen=True, eq=False)
class VideoSequence:
    """Ordered frames sharing identical width/height/channels."""

    frames: tuple[Frame, ...]

    def __post_init__(self) -> None:
        frames = tuple(self.frames)
        if not frames:
            raise ValueError("a video sequence needs at least one frame")
        first = frames[0]
        for i, f in enumerate(frames[1:], start=1):
            if (f.width, f.height, f.channels) != (first.width, first.height, first.channels):
                raise ValueError(
                    f"frame {i} is {f.width}x{f.height}x{f.channels}, expected "
                    f"{first.width}x{first.height}x{first.channels}"
                )
        object.__setattr__(self, "frames", frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def channels(self) -> int:
        return self.frames[0].channels

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, t: int) -> Frame:
        return self.frames[t]

    def __iter__(self):
        return iter(self.frames)


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Read one whitespace/comment-delimited header token from `pos`."""
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    if pos >= n:
        raise NetpbmParseError(f"unexpected end of header at byte {pos}")
    start = pos
    while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
        pos += 1
    return data[start:pos], pos


def _int_token(data: bytes, pos: int, what: str) -> tuple[int, int]:
    token, end = _next_token(data, pos)
    try:
        value = int(token)
    except ValueError:
        raise NetpbmParseError(
            f"expected integer {what} at byte {end - len(token)}, got {token!r}"
        ) from None
    return value, end


def read_netpbm(data: bytes) -> Frame:
    """Decode a binary PGM (P5) or PPM (P6) byte string, maxval 255 only."""
    if len(data) < 2 or data[:1] != b"P":
        raise NetpbmParseError("missing netpbm magic at byte 0")
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise NetpbmParseError(f"unsupported magic {magic!r} at byte 0 (want P5 or P6)")
    width, pos = _int_token(data, 2, "width")
    height, pos = _int_token(data, pos, "height")
    maxval, pos = _int_token(data, pos, "maxval")
    if width < 1 or height < 1:
        raise NetpbmParseError(f"invalid dimensions {width}x{height} in header")
    if maxval != 255:
        raise NetpbmParseError(f"unsupported maxval {maxval} at byte {pos} (only 255)")
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise NetpbmParseError(f"expected single whitespace after maxval at byte {pos}")
    pos += 1
    expected = width * height * channels
    payload = data[pos : pos + expected]
    if len(payload) < expected:
        raise NetpbmParseError(
            f"payload truncated at byte {len(data)}: expected {expected} sample "
            f"bytes from byte {pos}, found {len(payload)}"
        )
    if len(data) > pos + expected:
        raise NetpbmParseError(f"trailing data after payload at byte {pos + expected}")
    arr = np.frombuffer(payload, dtype=np.uint8)
    shape = (height, width) if channels == 1 else (height, width, 3)
    return Frame(arr.reshape(shape))


def write_netpbm(frame: Frame) -> bytes:
    """Encode a frame with the canonical header; inverse of read_netpbm."""
    magic = b"P5" if frame.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, frame.width, frame.height)
    return header + frame.pixels.tobytes()


def to_grayscale(frame: Frame) -> Frame:
    """ITU-R 601 grayscale (weights 0.299/0.587/0.114, rounded half-up)."""
    if frame.channels == 1:
        return frame
    rgb = frame.pixels.astype(np.float64)
    gray = _GRAY_WEIGHTS[0] * rgb[..., 0] + _GRAY_WEIGHTS[1] * rgb[..., 1] + _GRAY_WEIGHTS[2] * rgb[..., 2]
    return Frame(np.clip(np.floor(gray + 0.5), 0, 255).astype(np.uint8))


def crop(frame: Frame, box: BoundingBox) -> Frame:
    """Extract the box region; samples outside the frame replicate the edge.

    Output pixel (i, j) reads the source at (round(x1)+j, round(y1)+i)
    clamped into bounds, and the output size is the rounded box size.
    """
    out_w = round_half_up(box.width)
    out_h = round_half_up(box.height)
    if out_w < 1 or out_h < 1:
        raise DegenerateBoxError(f"box {box.as_tuple()} rounds to an empty crop")
    x0 = round_half_up(box.x1)
    y0 = round_half_up(box.y1)
    xs = np.clip(x0 + np.arange(out_w), 0, frame.width - 1)
    ys = np.clip(y0 + np.arange(out_h), 0, frame.height - 1)
    return Frame(frame.pixels[np.ix_(ys, xs)])


def resize_bilinear(frame: Frame, out_w: int, out_h: int) -> Frame:
    """Bilinear resize with half-pixel center alignment.

    The interpolation is written in delta form so constant inputs map to
    constant outputs exactly, and same-size resizes are identities.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError(f"target size must be positive, got {out_w}x{out_h}")
    src = frame.pixels.astype(np.float64)
    xs = (np.arange(out_w) + 0.5) * (frame.width / out_w) - 0.5
    ys = (np.arange(out_h) + 0.5) * (frame.height / out_h) - 0.5
    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    fx = xs - x0
    fy = ys - y0
    x0c = np.clip(x0, 0, frame.width - 1)
    x1c = np.clip(x0 + 1, 0, frame.width - 1)
    y0c = np.clip(y0, 0, frame.height - 1)
    y1c = np.clip(y0 + 1, 0, frame.height - 1)
    v00 = src[np.ix_(y0c, x0c)]
    v01 = src[np.ix_(y0c, x1c)]
    v10 = src[np.ix_(y1c, x0c)]
    v11 = src[np.ix_(y1c, x1c)]
    if frame.channels == 1:
        fxb = fx[np.newaxis, :]
        fyb = fy[:, np.newaxis]
    else:
        fxb = fx[np.newaxis, :, np.newaxis]
        fyb = fy[:, np.newaxis, np.newaxis]
    value = v00 + fxb * (v01 - v00) + fyb * (v10 - v00) + fxb * fyb * (v00 - v01 - v10 + v11)
    return Frame(np.clip(np.floor(value + 0.5), 0, 255).astype(np.uint8))


def read_frame(path: str | Path) -> Frame:
    return read_netpbm(Path(path).read_bytes())


def write_frame(path: str | Path, frame: Frame) -> None:
    Path(path).write_bytes(write_netpbm(frame))


def _frame_paths(directory: Path) -> list[Path]:
    paths = sorted(p for p in directory.iterdir() if p.name.startswith("frame_"))
    if not paths:
        raise InputError(f"no frame_*.pgm|ppm files in {directory}")
    for i, p in enumerate(paths):
        if p.suffix not in (".pgm", ".ppm") or p.stem != f"frame_{i:06d}":
            raise InputError(
                f"frame files must be frame_%06d.pgm|ppm contiguous from 0; "
                f"unexpected {p.name} at position {i}"
            )
    return paths


def read_sequence(directory: str | Path) -> VideoSequence:
    """Load a frame directory written by write_sequence (or cmd synth)."""
    d = Path(directory)
    if not d.is_dir():
        raise InputError(f"frame directory not found: {d}")
    return VideoSequence(tuple(read_frame(p) for p in _frame_paths(d)))


def write_sequence(video: VideoSequence, directory: str | Path) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    ext = "pgm" if video.channels == 1 else "ppm"
    paths = []
    for t, frame in enumerate(video):
        p = d / f"frame_{t:06d}.{ext}"
        write_frame(p, frame)
        paths.append(p)
    return paths
