"""Exception hierarchy shared across the package.

Every error raised on a documented failure path derives from
:class:`AnchorFrameError` so callers (and the CLI) can map failures to exit
codes without matching on message text.
"""


class AnchorFrameError(Exception):
    """Base class for all package errors."""


class InvalidGeometryError(AnchorFrameError):
    """A bounding box violates its ordering/area invariants."""


class DegenerateBoxError(InvalidGeometryError):
    """An operation collapsed a box to zero area (e.g. clamping a box that
    lies fully outside the frame)."""


class NetpbmParseError(AnchorFrameError):
    """Malformed PGM/PPM input; the message names the offending byte offset."""


class SizeError(AnchorFrameError):
    """An array dimension is not a power of two where the FFT requires it."""


class ConfigError(AnchorFrameError):
    """A configuration value violates its invariants, or a config file
    contains unknown keys."""


class ShapeError(AnchorFrameError):
    """Tensor arguments do not share the required shape."""


class UnparseablePromptError(AnchorFrameError):
    """No candidate object noun remains after stripping edit keywords."""


class SingleFrameError(AnchorFrameError):
    """No adjacent frames exist, so no tracking cycle can be run. Callers
    substitute a neutral score of 1 for the cycle term."""


class NoTargetFoundError(AnchorFrameError):
    """The detector produced no usable candidate box on any frame."""


class ServiceUnavailableError(AnchorFrameError):
    """A remote backend stayed unreachable after the configured retries."""


class ProtocolError(AnchorFrameError):
    """A remote backend answered with a payload that fails schema validation;
    no partial data is propagated."""


class SceneSpecError(AnchorFrameError):
    """A synthetic scene specification violates its invariants."""


class InputError(AnchorFrameError):
    """Invalid user-supplied input (missing/garbled files, mismatched frame
    counts, malformed CLI values)."""


class TensorFormatError(InputError):
    """A flat-binary tensor file is malformed."""
