"""Cross-service linking: remote-call matching and entity data overlaps.

This is the second dimension of the representation.  Matching is by
approximation (equal verb, equal normalized path, plus target-service
agreement when the call's host resolved); ambiguous matches are dropped
rather than guessed so that downstream impact traversal never follows an
invented edge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import LinkError, UndefinedSimilarityError
from .model import (
    UNRESOLVED,
    Component,
    DependencyEdge,
    EdgeKind,
    Endpoint,
    Entity,
    MicroserviceIR,
    OverlapEvidence,
    RemoteCallEvidence,
    RestCall,
    SystemIR,
    system_version_label,
    validate_system_ir,
)

DEFAULT_OVERLAP_THRESHOLD = 0.5


def _as_service_map(
    system: Mapping[str, MicroserviceIR] | Iterable[MicroserviceIR] | SystemIR,
) -> Mapping[str, MicroserviceIR]:
    if isinstance(system, SystemIR):
        return system.services
    if isinstance(system, Mapping):
        return system
    return {ir.name: ir for ir in system}


def _endpoint_sort_key(ep: Endpoint) -> tuple:
    return (
        ep.owning_component.microservice,
        str(ep.owning_component),
        ep.handler_method,
        ep.http_method,
        ep.path,
    )


def match_call_to_endpoint(
    call: RestCall,
    system: Mapping[str, MicroserviceIR] | Iterable[MicroserviceIR] | SystemIR,
) -> Endpoint | None:
    """Match one remote call against the system's endpoints.

    A resolved call only considers its named service.  An unresolved call
    accepts a unique verb-plus-path match anywhere in the system; several
    candidates are ambiguous and match nothing.  No match is a legitimate
    outcome consumed by the rules.
    """
    services = _as_service_map(system)
    if call.target_service != UNRESOLVED:
        service = services.get(call.target_service)
        if service is None:
            return None
        candidates = [
            ep
            for ep in service.iter_endpoints()
            if ep.http_method == call.http_method and ep.path == call.path
        ]
        if not candidates:
            return None
        # Duplicate (verb, path) pairs within a service violate an invariant
        # the scanner already warned about; resolve them deterministically.
        return min(candidates, key=_endpoint_sort_key)
    candidates = [
        ep
        for name in sorted(services)
        for ep in services[name].iter_endpoints()
        if ep.http_method == call.http_method and ep.path == call.path
    ]
    if len(candidates) == 1:
        return candidates[0]
    return None


def entity_overlap(a: Entity, b: Entity) -> float:
    """Jaccard index of the lower-cased field-name sets."""
    fields_a = a.field_names()
    fields_b = b.field_names()
    if not fields_a or not fields_b:
        raise UndefinedSimilarityError(
            f"entity overlap undefined for empty field set ({a.name}, {b.name})"
        )
    return len(fields_a & fields_b) / len(fields_a | fields_b)


def remote_call_edges(
    services: Mapping[str, MicroserviceIR],
) -> frozenset[DependencyEdge]:
    edges = set()
    for name in sorted(services):
        for call in services[name].iter_rest_calls():
            endpoint = match_call_to_endpoint(call, services)
            if endpoint is None:
                continue
            if endpoint.owning_component.microservice == name:
                continue  # cross-service dependencies only
            edges.add(
                DependencyEdge(
                    kind=EdgeKind.REMOTE_CALL,
                    source=call.owning_component,
                    target=endpoint.owning_component,
                    evidence=RemoteCallEvidence(rest_call=call, endpoint=endpoint),
                )
            )
    return frozenset(edges)


def overlap_edges_for_pairs(
    pairs: Iterable[tuple[Component, Component]], threshold: float
) -> set[DependencyEdge]:
    edges = set()
    for comp_a, comp_b in pairs:
        ent_a, ent_b = comp_a.entity_ref, comp_b.entity_ref
        if ent_a is None or ent_b is None:
            continue
        if not ent_a.fields or not ent_b.fields:
            continue  # empty entities are excluded from overlap analysis
        similarity = entity_overlap(ent_a, ent_b)
        if similarity < threshold:
            continue
        source, target = sorted((comp_a.id, comp_b.id), key=str)
        edges.add(
            DependencyEdge(
                kind=EdgeKind.DATA_OVERLAP,
                source=source,
                target=target,
                evidence=OverlapEvidence(similarity=similarity),
            )
        )
    return edges


def data_overlap_edges(
    services: Mapping[str, MicroserviceIR], threshold: float
) -> frozenset[DependencyEdge]:
    entity_components = [
        comp
        for name in sorted(services)
        for comp, _ in services[name].entities()
    ]
    pairs = [
        (a, b)
        for a, b in itertools.combinations(entity_components, 2)
        if a.id.microservice != b.id.microservice
    ]
    return frozenset(overlap_edges_for_pairs(pairs, threshold))


def build_system_ir(
    services: Iterable[MicroserviceIR],
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD,
    version_label: str | None = None,
) -> SystemIR:
    """Combine per-service representations into one linked system.

    Output is independent of input ordering.  When no label is given it is
    rendered from the per-service version ids.
    """
    service_map: dict[str, MicroserviceIR] = {}
    for ir in services:
        if ir.name in service_map:
            raise LinkError(f"duplicate service name {ir.name!r}")
        service_map[ir.name] = ir
    edges = remote_call_edges(service_map) | data_overlap_edges(
        service_map, overlap_threshold
    )
    system = SystemIR(
        version_label=(
            version_label
            if version_label is not None
            else system_version_label(service_map)
        ),
        services=service_map,
        cross_edges=frozenset(edges),
    )
    validate_system_ir(system)
    return system


# ---------------------------------------------------------------------------
# Link reporting (feeds the IC/UEM rules and the CLI report)
# ---------------------------------------------------------------------------


def matched_endpoints(system: SystemIR) -> frozenset[Endpoint]:
    hit = set()
    for call in system.iter_rest_calls():
        endpoint = match_call_to_endpoint(call, system)
        if endpoint is not None:
            hit.add(endpoint)
    return frozenset(hit)


def unmatched_calls(system: SystemIR) -> list[RestCall]:
    """Distinct rest calls with no matching endpoint anywhere in the system."""
    seen: set[tuple] = set()
    out: list[RestCall] = []
    for call in system.iter_rest_calls():
        if match_call_to_endpoint(call, system) is not None:
            continue
        key = (
            str(call.owning_component),
            call.http_method,
            call.target_service,
            call.path,
        )
        if key in seen:
            continue
        seen.add(key)
        out.append(call)
    out.sort(key=lambda c: (str(c.owning_component), c.signature(), c.site_method))
    return out


def uncalled_endpoints(system: SystemIR) -> list[Endpoint]:
    """Endpoints matched by zero rest calls system-wide."""
    hit = matched_endpoints(system)
    out = [ep for ep in system.iter_endpoints() if ep not in hit]
    out.sort(key=_endpoint_sort_key)
    return out


@dataclass
class LinkReport:
    matched_call_count: int
    unmatched_call_count: int
    uncalled_endpoint_count: int
    remote_call_edge_count: int
    data_overlap_edge_count: int

    def to_doc(self) -> dict:
        return {
            "matchedCalls": self.matched_call_count,
            "unmatchedCalls": self.unmatched_call_count,
            "uncalledEndpoints": self.uncalled_endpoint_count,
            "remoteCallEdges": self.remote_call_edge_count,
            "dataOverlapEdges": self.data_overlap_edge_count,
        }


def link_report(system: SystemIR) -> LinkReport:
    distinct: set[tuple] = set()
    matched = 0
    for call in system.iter_rest_calls():
        key = (
            str(call.owning_component),
            call.http_method,
            call.target_service,
            call.path,
        )
        if key in distinct:
            continue
        distinct.add(key)
        if match_call_to_endpoint(call, system) is not None:
            matched += 1
    return LinkReport(
        matched_call_count=matched,
        unmatched_call_count=len(distinct) - matched,
        uncalled_endpoint_count=len(uncalled_endpoints(system)),
        remote_call_edge_count=sum(
            1 for e in system.cross_edges if e.kind is EdgeKind.REMOTE_CALL
        ),
        data_overlap_edge_count=sum(
            1 for e in system.cross_edges if e.kind is EdgeKind.DATA_OVERLAP
        ),
    )
