"""Domain error hierarchy.

Every failure mode a caller is expected to handle gets its own class so the
CLI and API layers can map them to exit codes / HTTP statuses without string
matching.
"""


class IdreconError(Exception):
    """Base class for all domain errors raised by this package."""


# -- entity graph -----------------------------------------------------------

class EmptyValue(IdreconError):
    """Node value is empty after canonicalization."""


class InvalidPathValue(IdreconError):
    """File-kind node value does not resolve inside the project Files/ dir."""


class UnknownNode(IdreconError):
    """Referenced node id does not exist."""


class SchemaViolation(IdreconError):
    """Document does not match its declared schema."""


class DanglingEdge(IdreconError):
    """Imported edge references a node id absent from the document."""


class DuplicateId(IdreconError):
    """Imported document contains a repeated node or edge id."""


# -- module engine ----------------------------------------------------------

class DuplicateName(IdreconError):
    """A module with this name is already registered."""


class InvalidDescriptor(IdreconError):
    """Module descriptor violates a registry invariant."""


class UnknownModule(IdreconError):
    """No registered module under this name."""


class KindMismatch(IdreconError):
    """Module cannot consume a node of this kind."""


class ParamInvalid(IdreconError):
    """Job parameter unknown or of the wrong type."""


class UnknownJob(IdreconError):
    """Referenced job id does not exist."""


class ParseError(IdreconError):
    """Tool output does not parse as a list literal.

    Carries the character offset of the offending input and a short reason.
    """

    def __init__(self, position: int, reason: str):
        super().__init__(f"parse error at offset {position}: {reason}")
        self.position = position
        self.reason = reason


# -- generators -------------------------------------------------------------

class EmptyAfterFold(IdreconError):
    """Name part contains no usable characters after folding."""


class InvalidDomain(IdreconError):
    """Domain fails the LDH / dot-separated-labels syntax rule."""


# -- site probe -------------------------------------------------------------

class BadTemplate(IdreconError):
    """Site URL template must contain {username} exactly once."""


class ReplayMiss(IdreconError):
    """Replay transport has no recording for this (method, url)."""


class NetworkFailure(IdreconError):
    """Live or record fetch failed at the network level."""


# -- media analysis ---------------------------------------------------------

class NotJpeg(IdreconError):
    """Input bytes do not start with a JPEG SOI marker."""


class CorruptExif(IdreconError):
    """EXIF structure is truncated or internally inconsistent."""


class MalformedDate(IdreconError):
    """EXIF datetime field is present but not in YYYY:MM:DD HH:MM:SS form."""


class AdapterUnavailable(IdreconError):
    """Requested analysis adapter is not registered / has no fixture."""


class AdapterError(IdreconError):
    """Adapter ran but failed to produce a usable result."""


# -- text analysis ----------------------------------------------------------

class SpanNotFound(IdreconError):
    """Token could not be located in the source text (whole-word scan)."""


# -- wordlist ---------------------------------------------------------------

class EmptyTokenSet(IdreconError):
    """Wordlist generation requires at least one base token."""


class SinkError(IdreconError):
    """Wordlist output sink failed."""


# -- project store ----------------------------------------------------------

class PathOccupied(IdreconError):
    """Project init target exists and is not an empty directory."""


class IoError(IdreconError):
    """Filesystem operation failed."""
