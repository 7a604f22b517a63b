"""Exception hierarchy shared across the package."""


class GestureBotError(Exception):
    """Base class for all package errors."""


# --- raster / codecs ---

class MalformedHeader(GestureBotError):
    """Image file header is unparseable or self-inconsistent."""


class TruncatedPayload(GestureBotError):
    """Fewer payload bytes than the header promised."""


class UnsupportedMaxval(GestureBotError):
    """PGM maxval above 255 (16-bit graymaps are not supported)."""


# --- motion gate / frames ---

class DimensionMismatch(GestureBotError):
    """Frames in one operation do not share width/height."""


# --- segmenter ---

class NoForeground(GestureBotError):
    """Binary frame contains no foreground pixels."""


class NoQualifyingRows(GestureBotError):
    """No row or column clears its noise offset during ROI search."""


# --- classifier ---

class EmptyTemplateSet(GestureBotError):
    """Training was attempted with zero templates."""


class GeometryMismatch(GestureBotError):
    """Image dimensions disagree with the template geometry."""


# --- command mapping ---

class SchemaViolation(GestureBotError):
    """Mapping config does not match the documented JSON schema."""


class MagnitudeOutOfRange(GestureBotError):
    """Command magnitude outside the allowed bounds."""


# --- robot simulator ---

class InvalidState(GestureBotError):
    """Robot state violates its invariants on entry."""


# --- wire protocol ---

class WireError(GestureBotError):
    """Base class for datagram codec errors."""


class BadMagic(WireError):
    pass


class UnsupportedVersion(WireError):
    pass


class UnknownKind(WireError):
    pass


class LengthMismatch(WireError):
    pass


class PayloadTooLarge(WireError):
    pass


class InconsistentGeometry(WireError):
    """Chunks of one frame id disagree on geometry or chunk count."""
