"""Exception types shared across the package."""

from __future__ import annotations


class ArchDeltaError(Exception):
    """Base class for all archdelta errors."""


class DocumentError(ArchDeltaError):
    """A document failed to parse or validate.

    ``location`` is a JSON-path style string pointing at the offending field.
    """

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


class ExtractionError(ArchDeltaError):
    """A source tree or source unit could not be processed."""


class AmbiguousMarkerError(ExtractionError):
    """A source unit carries classification markers from two different sets."""


class LinkError(ArchDeltaError):
    """System linking failed (e.g. duplicate service names)."""


class UndefinedSimilarityError(LinkError):
    """Entity overlap requested for an entity with an empty field set."""


class DeltaError(ArchDeltaError):
    """Delta computation or composition over mismatched inputs."""


class MergeError(ArchDeltaError):
    """A delta names a component the baseline does not contain."""


class StaleBaselineError(MergeError):
    """A MODIFY's recorded old hash does not match the baseline component."""


class RuleBindingError(ArchDeltaError):
    """A rule uses vocabulary the evaluator cannot dispatch."""
