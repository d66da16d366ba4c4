"""Applying a delta to a system baseline: the increment.

Cross-service edges are maintained incrementally rather than relinked from
scratch: edges incident to changed components are dropped and re-derived,
every currently unmatched call is re-matched (an added endpoint can satisfy
a dangling call in another service), and kept edges whose call could now be
shadowed by a changed endpoint are re-verified.  The result is structurally
identical to a full rebuild over the updated services.
"""

from __future__ import annotations

from .delta import apply_to_service
from .errors import MergeError
from .linker import (
    DEFAULT_OVERLAP_THRESHOLD,
    match_call_to_endpoint,
    overlap_edges_for_pairs,
)
from .model import (
    ChangeKind,
    Delta,
    DependencyEdge,
    EdgeKind,
    MicroserviceIR,
    RemoteCallEvidence,
    SystemIR,
    system_version_label,
    validate_system_ir,
)


def _empty_service(name: str, version_id: str) -> MicroserviceIR:
    return MicroserviceIR(
        name=name, version_id=version_id, components={}, call_graph_edges=frozenset()
    )


def apply_delta(
    baseline: SystemIR,
    d: Delta,
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD,
) -> SystemIR:
    """Produce the next system version from a baseline and one delta."""
    old_service = baseline.services.get(d.microservice)
    if old_service is None:
        if any(ch.kind is not ChangeKind.ADD for ch in d.changes):
            raise MergeError(
                f"delta targets unknown service {d.microservice!r} "
                "and is not purely additive"
            )
        old_service = _empty_service(d.microservice, d.old_version_id)
    new_service = apply_to_service(old_service, d)
    services = dict(baseline.services)
    services[d.microservice] = new_service

    changed = d.change_ids()
    kept: set[DependencyEdge] = {
        edge
        for edge in baseline.cross_edges
        if edge.source not in changed and edge.target not in changed
    }

    # Kept edges can be shadowed by an endpoint the delta introduced or
    # modified: re-verify any kept edge whose call shape such an endpoint
    # now also serves.
    changed_after = [
        ch.new_component
        for ch in d.changes
        if ch.kind in (ChangeKind.ADD, ChangeKind.MODIFY)
    ]
    new_endpoint_shapes = {
        (ep.http_method, ep.path) for comp in changed_after for ep in comp.endpoints
    }
    edges: set[DependencyEdge] = set()
    covered_calls = set()
    for edge in kept:
        if edge.kind is not EdgeKind.REMOTE_CALL:
            edges.add(edge)
            continue
        call = edge.evidence.rest_call
        if (call.http_method, call.path) in new_endpoint_shapes:
            endpoint = match_call_to_endpoint(call, services)
            if (
                endpoint is not None
                and endpoint.owning_component.microservice
                != call.owning_component.microservice
            ):
                edges.add(
                    DependencyEdge(
                        kind=EdgeKind.REMOTE_CALL,
                        source=call.owning_component,
                        target=endpoint.owning_component,
                        evidence=RemoteCallEvidence(rest_call=call, endpoint=endpoint),
                    )
                )
                covered_calls.add(call)
            continue
        edges.add(edge)
        covered_calls.add(call)

    # Re-match every call without a surviving edge; this re-derives edges of
    # changed components and lets new endpoints satisfy old dangling calls.
    for name in sorted(services):
        for call in services[name].iter_rest_calls():
            if call in covered_calls:
                continue
            endpoint = match_call_to_endpoint(call, services)
            if endpoint is None:
                continue
            if endpoint.owning_component.microservice == name:
                continue
            edges.add(
                DependencyEdge(
                    kind=EdgeKind.REMOTE_CALL,
                    source=call.owning_component,
                    target=endpoint.owning_component,
                    evidence=RemoteCallEvidence(rest_call=call, endpoint=endpoint),
                )
            )

    # Data overlaps only change for pairs involving a changed entity.
    changed_entities = [
        comp for comp in changed_after if comp.entity_ref is not None
    ]
    other_entities = [
        comp
        for name in sorted(services)
        for comp, _ in services[name].entities()
    ]
    pairs = [
        (a, b)
        for a in changed_entities
        for b in other_entities
        if a.id.microservice != b.id.microservice
    ]
    edges |= overlap_edges_for_pairs(pairs, overlap_threshold)

    increment = SystemIR(
        version_label=system_version_label(services),
        services=services,
        cross_edges=frozenset(edges),
    )
    validate_system_ir(increment)
    return increment


def remove_service(
    baseline: SystemIR,
    name: str,
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD,
) -> SystemIR:
    """Drop a whole service (its checkout disappeared from the system)."""
    service = baseline.services.get(name)
    if service is None:
        raise MergeError(f"cannot remove unknown service {name!r}")
    from .model import ComponentChange  # local import to keep module surface tidy

    all_deletes = Delta(
        microservice=name,
        old_version_id=service.version_id,
        new_version_id=f"{service.version_id}-removed",
        changes=tuple(
            ComponentChange(
                kind=ChangeKind.DELETE,
                component_id=cid,
                old_content_hash=service.components[cid].content_hash,
            )
            for cid in sorted(service.components)
        ),
    )
    increment = apply_delta(baseline, all_deletes, overlap_threshold)
    services = {k: v for k, v in increment.services.items() if k != name}
    system = SystemIR(
        version_label=system_version_label(services),
        services=services,
        cross_edges=increment.cross_edges,
    )
    validate_system_ir(system)
    return system
