"""Exception types shared across the pipeline."""


class AttnSyntaxError(Exception):
    """Base class for every error raised by this package."""


class DumpParseError(AttnSyntaxError):
    """A dump record could not be decoded."""


class DumpValidationError(AttnSyntaxError):
    """A decoded dump violates a structural invariant."""


class SegmentationError(AttnSyntaxError):
    """Subword continuation markers do not form valid words."""


class TreeParseError(AttnSyntaxError):
    """A bracketed tree string is malformed."""


class AlignmentError(AttnSyntaxError):
    """Two per-sentence inputs do not describe the same sentence."""
