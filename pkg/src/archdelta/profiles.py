"""Marker profiles: the annotation vocabulary driving extraction.

A profile is data, not code; stacks other than the bundled Java Spring
vocabulary are added by writing a new profile document and passing it via
``--profile`` (or the ``ARCHDELTA_PROFILE`` environment variable).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .errors import DocumentError

PROFILE_SCHEMA = "marker-profile@1"

# endpoint_markers value for composite tokens whose HTTP verb comes from an
# explicit attribute on the annotation (e.g. method = RequestMethod.POST).
FROM_ATTRIBUTE = "FROM_ATTRIBUTE"

_VERB_VALUES = {"GET", "POST", "PUT", "DELETE", "PATCH", FROM_ATTRIBUTE}


@dataclass(frozen=True)
class RemoteCallPattern:
    """Shape of a remote-call invocation.

    ``verb`` is either a fixed HTTP verb string or an integer argument
    position whose value names the verb (``HttpMethod.GET`` or ``"GET"``).
    """

    receiver_type: str
    method_name: str
    url_arg: int
    verb: str | int


@dataclass(frozen=True)
class MarkerProfile:
    controller_markers: frozenset[str]
    service_markers: frozenset[str]
    repository_markers: frozenset[str]
    entity_markers: frozenset[str]
    endpoint_markers: Mapping[str, str]
    remote_call_patterns: tuple[RemoteCallPattern, ...]
    file_extensions: tuple[str, ...] = (".java",)

    def __post_init__(self):
        sets = [
            ("controller", self.controller_markers),
            ("service", self.service_markers),
            ("repository", self.repository_markers),
            ("entity", self.entity_markers),
        ]
        for i, (name_a, a) in enumerate(sets):
            for name_b, b in sets[i + 1 :]:
                overlap = a & b
                if overlap:
                    raise ValueError(
                        f"{name_a} and {name_b} marker sets overlap: {sorted(overlap)}"
                    )

    def classification_sets(self):
        from .model import ComponentType

        return (
            (ComponentType.CONTROLLER, self.controller_markers),
            (ComponentType.SERVICE, self.service_markers),
            (ComponentType.REPOSITORY, self.repository_markers),
            (ComponentType.ENTITY, self.entity_markers),
        )


def _marker_set(doc: Any, key: str, loc: str) -> frozenset[str]:
    if key not in doc or not isinstance(doc[key], list):
        raise DocumentError(f"missing or non-list key '{key}'", loc)
    return frozenset(str(t) for t in doc[key])


def profile_from_doc(doc: Any, loc: str = "$") -> MarkerProfile:
    if not isinstance(doc, dict):
        raise DocumentError("profile document must be an object", loc)
    markers_loc = loc
    endpoint_markers = doc.get("endpointMarkers")
    if not isinstance(endpoint_markers, dict):
        raise DocumentError("missing or non-object key 'endpointMarkers'", loc)
    for token, verb in endpoint_markers.items():
        if verb not in _VERB_VALUES:
            raise DocumentError(
                f"endpoint marker {token!r} maps to unknown verb {verb!r}",
                f"{loc}.endpointMarkers.{token}",
            )
    patterns = []
    raw_patterns = doc.get("remoteCallPatterns")
    if not isinstance(raw_patterns, list):
        raise DocumentError("missing or non-list key 'remoteCallPatterns'", loc)
    for i, p in enumerate(raw_patterns):
        ploc = f"{loc}.remoteCallPatterns[{i}]"
        if not isinstance(p, dict):
            raise DocumentError("pattern must be an object", ploc)
        verb: str | int
        raw_verb = p.get("verb")
        if isinstance(raw_verb, str):
            verb = raw_verb
        elif isinstance(raw_verb, dict) and isinstance(raw_verb.get("argIndex"), int):
            verb = raw_verb["argIndex"]
        else:
            raise DocumentError(
                "pattern verb must be a verb string or {\"argIndex\": n}",
                f"{ploc}.verb",
            )
        try:
            patterns.append(
                RemoteCallPattern(
                    receiver_type=str(p["receiverType"]),
                    method_name=str(p["methodName"]),
                    url_arg=int(p["urlArg"]),
                    verb=verb,
                )
            )
        except KeyError as exc:
            raise DocumentError(f"pattern missing key {exc}", ploc) from exc
    extensions = tuple(doc.get("fileExtensions", [".java"]))
    try:
        return MarkerProfile(
            controller_markers=_marker_set(doc, "controllerMarkers", markers_loc),
            service_markers=_marker_set(doc, "serviceMarkers", markers_loc),
            repository_markers=_marker_set(doc, "repositoryMarkers", markers_loc),
            entity_markers=_marker_set(doc, "entityMarkers", markers_loc),
            endpoint_markers=dict(endpoint_markers),
            remote_call_patterns=tuple(patterns),
            file_extensions=extensions,
        )
    except ValueError as exc:
        raise DocumentError(str(exc), loc) from exc


def load_profile(path: str | Path) -> MarkerProfile:
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DocumentError(f"invalid profile JSON: {exc}") from exc
    if doc.get("schema") != PROFILE_SCHEMA:
        raise DocumentError(
            f"expected schema {PROFILE_SCHEMA}, got {doc.get('schema')!r}", "$.schema"
        )
    return profile_from_doc(doc)


def default_profile() -> MarkerProfile:
    """The bundled Java Spring profile."""
    raw = resources.files("archdelta.data.profiles").joinpath("spring.json").read_bytes()
    doc = json.loads(raw.decode("utf-8"))
    return profile_from_doc(doc)
