"""Exception hierarchy for the ghostink toolkit.

Every error raised on a purposeful failure path derives from
:class:`GhostinkError` so callers can catch toolkit failures without
swallowing programming mistakes.
"""

from __future__ import annotations


class GhostinkError(Exception):
    """Base class for all toolkit errors."""


class DocumentError(GhostinkError):
    """Problems loading or interpreting a PDF document."""


class ParseError(DocumentError):
    """The byte stream is not a PDF we can interpret."""


class EncryptedDocumentError(DocumentError):
    """The document declares encryption; we refuse rather than misparse."""


class UnknownElementError(DocumentError):
    """An element id does not resolve against the document."""


class RewriteError(DocumentError):
    """A structural edit could not be applied to the document."""


class RenderError(GhostinkError):
    """Rasterization failed for a reason other than geometry."""


class OutOfPageBoundsError(RenderError):
    """A requested raster region has no overlap with the page."""


class EmptyRegionError(RenderError):
    """A raster region degenerates to zero pixels."""


class GenerationError(GhostinkError):
    """Corpus generation failures."""


class TemplateNotFoundError(GenerationError):
    """The requested resume template name does not exist."""


class PlacementConflictError(GenerationError):
    """A payload cannot be placed without violating its hiding contract."""


class BackendError(GhostinkError):
    """Semantic backend (verifier or visual analyzer) failures."""


class BackendUnavailableError(BackendError):
    """The remote backend is unreachable or misconfigured."""


class MalformedBackendResponseError(BackendError):
    """The backend replied with something we cannot interpret as a verdict."""


class ContextOverflowError(BackendError):
    """The excerpt or page bundle exceeds the backend context budget."""


class MetricsError(GhostinkError):
    """Invalid inputs to measurement computations."""


class EmptyInputError(MetricsError):
    """A computation that needs at least one observation received none."""


class InvalidCountsError(MetricsError):
    """Counts are negative, inconsistent, or successes exceed trials."""


class MissingVolumeError(MetricsError):
    """Extrapolation requested for a period with no volume figure."""
