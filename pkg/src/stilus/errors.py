"""Exception types shared across the toolkit.

The CLI maps ValidationError to exit code 2 and every other StilusError
to exit code 1.
"""


class StilusError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(StilusError):
    """Input violates a documented precondition."""


class LoadError(StilusError):
    """A referenced file is missing or unreadable."""


class FormatError(StilusError):
    """A file or wire payload does not match its declared format."""


class ProviderError(StilusError):
    """An embedding provider failed while serving a request."""


class MetricError(StilusError):
    """A metric is undefined for the given input (e.g. a zero vector)."""


class DegenerateDataError(StilusError):
    """Data carries no usable structure (e.g. all rows identical)."""
