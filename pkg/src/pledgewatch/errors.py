"""Exception types shared across the package."""


class PledgewatchError(Exception):
    """Base class for all package errors."""


class ValidationError(PledgewatchError):
    """A domain object failed validation. Carries the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NormalizationError(PledgewatchError):
    """A temporal expression could not be resolved."""

    def __init__(self, expression: str, reason: str = "unrecognized expression"):
        self.expression = expression
        super().__init__(f"cannot normalize {expression!r}: {reason}")


class MissingAnchorError(NormalizationError):
    """A relative temporal expression was given without an anchor date."""

    def __init__(self, expression: str):
        super().__init__(expression, "relative expression requires an anchor date")


class ProviderError(PledgewatchError):
    """Base class for provider-side failures."""


class TransportError(ProviderError):
    """Network-level failure; safe to retry."""


class RateLimitError(ProviderError):
    """Provider quota exhausted. ``retry_after`` is a hint in seconds."""

    def __init__(self, message: str = "rate limited", retry_after: float = 1.0):
        self.retry_after = retry_after
        super().__init__(message)


class EmptyResponseError(ProviderError):
    """The LLM provider returned no usable output."""


class ScrapeError(ProviderError):
    """A URL could not be fetched or yielded no extractable text."""

    def __init__(self, url: str, reason: str):
        self.url = url
        self.reason = reason
        super().__init__(f"scrape failed for {url}: {reason}")


class EventParseError(PledgewatchError):
    """LLM output for event extraction contained no parseable JSON."""


class ClassificationError(PledgewatchError):
    """Fulfilment classification failed after retries."""


class InputFileError(PledgewatchError):
    """A CLI/harness input file is malformed. Carries the line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        suffix = f" (line {line})" if line is not None else ""
        super().__init__(message + suffix)


class SplitPartitionError(PledgewatchError):
    """A pledge's instances span more than one evaluation split."""


class NotFoundError(PledgewatchError):
    """A referenced run, pledge, or event does not exist."""
