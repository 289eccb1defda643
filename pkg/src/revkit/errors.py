"""Exception hierarchy shared across the toolkit."""


class RevkitError(Exception):
    """Base class for all domain errors raised by revkit."""


class DocumentError(RevkitError):
    """Malformed document structure or node references."""


class SegmentationError(RevkitError):
    """A segmenter produced invalid spans."""


class AlignmentError(RevkitError):
    """Pre-alignment preconditions violated."""


class AnalyticsError(RevkitError):
    """Degenerate input to an analytics computation."""


class CorrectionError(RevkitError):
    """A correction op references unknown nodes or edits.

    Carries ``position``: the index of the offending op in the batch.
    """

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class SchemaError(RevkitError):
    """A file failed schema validation on load."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f" ({path}" + (f":{line}" if line is not None else "") + ")"
        super().__init__(message + loc)
        self.path = path
        self.line = line


class VerdictParseError(RevkitError):
    """An LLM response did not contain a recognizable label.

    Carries ``raw`` with the unparsed response text.
    """

    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


class ProviderError(RevkitError):
    """Typed failure from an embedding or chat provider."""

    KINDS = ("rate-limit", "over-length", "transport")

    def __init__(self, kind: str, message: str = ""):
        if kind not in self.KINDS:
            raise ValueError(f"unknown provider error kind: {kind}")
        super().__init__(message or kind)
        self.kind = kind

    @property
    def retryable(self) -> bool:
        return self.kind == "rate-limit"
