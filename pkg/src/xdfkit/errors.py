"""Exception and warning types shared across the package."""


class XdfError(Exception):
    """Base class for every error raised by this package."""


class XdfWarning(UserWarning):
    """Non-fatal condition worth surfacing (duplicate clock knots, short series, ...)."""


# file format

class MagicError(XdfError):
    """Source does not start with the 4-byte container magic."""


class WidthError(XdfError):
    """Variable-length integer announced a width other than 1, 4 or 8."""


class TruncatedError(XdfError):
    """Fewer bytes available than a length field or fixed layout requires."""


class FormatError(XdfError):
    """Malformed metadata (XML) or otherwise undecodable chunk content."""


class FlagError(XdfError):
    """Per-sample timestamp flag byte was neither 0 nor 8."""


class Utf8Error(XdfError):
    """Invalid UTF-8 in a string sample (only raised in strict paths)."""


# timeline

class MissingStampError(XdfError):
    """A sample that must carry an explicit timestamp does not."""


class DegenerateError(XdfError):
    """Timestamp span is empty or inverted; no rate can be derived."""


class RateError(XdfError):
    """Resampling rates are nonpositive or not a usable rational ratio."""


class NoRegularStreamError(XdfError):
    """No stream with a nominal rate > 0 to derive a common rate from."""


class WindowError(XdfError):
    """Requested window is empty, inverted, or too short for the operation."""


# annotations

class ValidationError(XdfError):
    """Event fields violate their invariants (negative duration, empty label)."""


class HeaderError(XdfError):
    """CSV header line does not match the defined schema."""


class RowError(XdfError):
    """CSV row is malformed; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


# synthetic experiment

class ConfigError(XdfError):
    """Generator configuration violates its invariants."""


class EdgeError(XdfError):
    """Requested time is too close to the signal edges for a centered fit."""


class PhaseUndefinedError(XdfError):
    """Fitted oscillation amplitude is too small for a meaningful phase."""


class MissingStreamError(XdfError):
    """Recording lacks a stream the operation requires."""
