"""Domain model for the system representation.

The representation has two dimensions: per-service component graphs
(controllers, services, repositories, entities and the method calls between
them) and cross-service dependency edges recovered from remote calls and
entity data overlaps.  Everything in this module is an immutable value;
instances can be shared freely across threads.

Identity and content are kept separate on purpose: a :class:`ComponentId` is
name-based and survives edits, while ``content_hash`` tracks what the
component currently contains.  Version diffing compares hashes under stable
identities.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping

UNRESOLVED = "UNRESOLVED"
PATH_VAR = "{*}"
HTTP_METHODS = ("GET", "POST", "PUT", "DELETE", "PATCH")

# Placeholder spliced into URL strings where a non-literal expression sat.
NON_LITERAL = "\x00"


class ComponentType(str, Enum):
    CONTROLLER = "Controller"
    SERVICE = "Service"
    REPOSITORY = "Repository"
    ENTITY = "Entity"


class ChangeKind(str, Enum):
    ADD = "ADD"
    MODIFY = "MODIFY"
    DELETE = "DELETE"


class EdgeKind(str, Enum):
    REMOTE_CALL = "RemoteCall"
    DATA_OVERLAP = "DataOverlap"


# ---------------------------------------------------------------------------
# Source text normalization and hashing
# ---------------------------------------------------------------------------


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def blank_comments(text: str) -> str:
    """Replace comment characters with spaces, preserving offsets.

    String and character literals are respected, so ``"http://x"`` is never
    mistaken for a line comment.  Newlines inside block comments survive so
    line-based tooling keeps its bearings.
    """
    out = list(text)
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == '"' or c == "'":
            quote = c
            i += 1
            while i < n:
                if text[i] == "\\":
                    i += 2
                    continue
                if text[i] == quote:
                    i += 1
                    break
                i += 1
            continue
        if c == "/" and i + 1 < n:
            nxt = text[i + 1]
            if nxt == "/":
                while i < n and text[i] != "\n":
                    out[i] = " "
                    i += 1
                continue
            if nxt == "*":
                end = text.find("*/", i + 2)
                stop = n if end < 0 else end + 2
                while i < stop:
                    if text[i] != "\n":
                        out[i] = " "
                    i += 1
                continue
        i += 1
    return "".join(out)


def normalize_source_text(text: str) -> str:
    """Canonical form of a source fragment for hashing.

    Comments are dropped and whitespace runs collapse to a single space, but
    only outside string literals: whitespace inside a literal is content.
    """
    blanked = blank_comments(text)
    out: list[str] = []
    pending_space = False
    i, n = 0, len(blanked)
    while i < n:
        c = blanked[i]
        if c == '"' or c == "'":
            if pending_space and out:
                out.append(" ")
            pending_space = False
            quote = c
            out.append(c)
            i += 1
            while i < n:
                out.append(blanked[i])
                if blanked[i] == "\\" and i + 1 < n:
                    out.append(blanked[i + 1])
                    i += 2
                    continue
                if blanked[i] == quote:
                    i += 1
                    break
                i += 1
            continue
        if c.isspace():
            pending_space = True
            i += 1
            continue
        if pending_space and out:
            out.append(" ")
        pending_space = False
        out.append(c)
        i += 1
    return "".join(out)


def method_content_hash(body_text: str | None) -> str:
    """Digest of the normalized method body; formatting-only edits hash equal."""
    return _sha256(normalize_source_text(body_text or ""))


def normalize_path(path: str) -> str:
    """Normalize a URL path template.

    The result always starts with ``/``; query strings are dropped and any
    segment holding a path variable (``{id}``) or a spliced non-literal
    expression collapses to the ``{*}`` token, so ``/order/{id}`` and
    ``/order/{orderId}`` compare equal.
    """
    path = (path or "").strip()
    path = path.split("?", 1)[0]
    segments = [s for s in path.split("/") if s]
    parts = [
        PATH_VAR if ("{" in s or "}" in s or NON_LITERAL in s) else s
        for s in segments
    ]
    return "/" + "/".join(parts)


# ---------------------------------------------------------------------------
# Identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class ComponentId:
    """Name-based identity: (service, component type, qualified unit name)."""

    microservice: str
    component_type: ComponentType
    qualified_name: str

    def __str__(self) -> str:
        return f"{self.microservice}::{self.component_type.value}::{self.qualified_name}"


def component_id(
    service_name: str, ctype: ComponentType, qualified_name: str
) -> ComponentId:
    """Build a ComponentId, rejecting empty name parts."""
    if not service_name:
        raise ValueError("service name must be nonempty")
    if not qualified_name:
        raise ValueError("qualified name must be nonempty")
    return ComponentId(service_name, ComponentType(ctype), qualified_name)


# ---------------------------------------------------------------------------
# Members
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Parameter:
    name: str
    declared_type: str


@dataclass(frozen=True)
class RestCall:
    """A remote HTTP invocation found in a method body.

    ``target_service`` is the host name of a literal URL, or ``UNRESOLVED``
    when the host expression could not be evaluated statically.
    """

    http_method: str
    target_service: str
    path: str
    site_method: str
    owning_component: ComponentId

    def signature(self) -> str:
        return f"{self.http_method} {self.target_service} {self.path}"


@dataclass(frozen=True)
class Endpoint:
    http_method: str
    path: str
    handler_method: str
    owning_component: ComponentId

    def signature(self) -> str:
        return f"{self.http_method} {self.path}"


@dataclass(frozen=True)
class Method:
    """One declared method.

    ``body_call_targets`` entries are strings of the form
    ``"Receiver.method/arity"`` when the receiver's declared type is known
    (field injection or a local declaration) and ``"method/arity"`` for bare
    calls; they resolve against sibling components by name and arity.
    """

    name: str
    parameters: tuple[Parameter, ...] = ()
    return_type: str = ""
    annotations: tuple[str, ...] = ()
    body_call_targets: tuple[str, ...] = ()
    rest_calls: tuple[RestCall, ...] = ()
    content_hash: str = ""

    @property
    def arity(self) -> int:
        return len(self.parameters)

    def signature(self) -> str:
        params = ",".join(p.declared_type for p in self.parameters)
        return f"{self.name}({params})"


@dataclass(frozen=True)
class EntityField:
    field_name: str
    declared_type: str


@dataclass(frozen=True)
class Entity:
    name: str
    fields: tuple[EntityField, ...] = ()
    annotations: tuple[str, ...] = ()

    def field_names(self) -> frozenset[str]:
        return frozenset(f.field_name.lower() for f in self.fields)


@dataclass(frozen=True)
class Component:
    id: ComponentId
    methods: tuple[Method, ...] = ()
    endpoints: tuple[Endpoint, ...] = ()
    entity_ref: Entity | None = None
    source_path: str = ""
    content_hash: str = ""


def _method_sort_key(m: Method) -> tuple:
    return (m.name, m.arity, m.signature())


def _endpoint_sort_key(e: Endpoint) -> tuple:
    return (e.http_method, e.path, e.handler_method)


def hash_component(c: Component) -> str:
    """Digest over canonically ordered member content.

    Insensitive to member iteration order; sensitive to any method body,
    signature, annotation, endpoint or entity-field change.  The source path
    is deliberately not hashed: a file move that preserves the qualified name
    is not a change.
    """
    parts: list[str] = []
    for m in sorted(c.methods, key=_method_sort_key):
        calls = ";".join(r.signature() for r in m.rest_calls)
        parts.append(
            "m|{name}|{params}|{ret}|{anns}|{body}|{targets}|{calls}".format(
                name=m.name,
                params=",".join(f"{p.name}:{p.declared_type}" for p in m.parameters),
                ret=m.return_type,
                anns=";".join(m.annotations),
                body=m.content_hash,
                targets=";".join(m.body_call_targets),
                calls=calls,
            )
        )
    for e in sorted(c.endpoints, key=_endpoint_sort_key):
        parts.append(f"e|{e.http_method}|{e.path}|{e.handler_method}")
    if c.entity_ref is not None:
        ent = c.entity_ref
        fields = ",".join(
            f"{f.field_name}:{f.declared_type}"
            for f in sorted(ent.fields, key=lambda f: (f.field_name, f.declared_type))
        )
        parts.append(f"d|{ent.name}|{fields}|{';'.join(ent.annotations)}")
    return _sha256("\n".join(parts))


def make_component(
    cid: ComponentId,
    methods: Iterable[Method] = (),
    endpoints: Iterable[Endpoint] = (),
    entity_ref: Entity | None = None,
    source_path: str = "",
) -> Component:
    """Canonical Component constructor: sorts members, computes the hash."""
    methods = tuple(sorted(methods, key=_method_sort_key))
    endpoints = tuple(sorted(endpoints, key=_endpoint_sort_key))
    if endpoints and cid.component_type is not ComponentType.CONTROLLER:
        raise ValueError(f"{cid}: endpoints are only valid on controllers")
    if (entity_ref is not None) != (cid.component_type is ComponentType.ENTITY):
        raise ValueError(f"{cid}: entity payload must be present iff type is Entity")
    if entity_ref is not None:
        entity_ref = Entity(
            name=entity_ref.name,
            fields=tuple(
                sorted(entity_ref.fields, key=lambda f: (f.field_name, f.declared_type))
            ),
            annotations=tuple(entity_ref.annotations),
        )
    base = Component(
        id=cid,
        methods=methods,
        endpoints=endpoints,
        entity_ref=entity_ref,
        source_path=source_path,
    )
    return Component(
        id=cid,
        methods=methods,
        endpoints=endpoints,
        entity_ref=entity_ref,
        source_path=source_path,
        content_hash=hash_component(base),
    )


# ---------------------------------------------------------------------------
# Per-service and system graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MicroserviceIR:
    name: str
    version_id: str
    components: Mapping[ComponentId, Component]
    call_graph_edges: frozenset[tuple[ComponentId, ComponentId]]

    def iter_methods(self) -> Iterator[tuple[Component, Method]]:
        for comp in self.components.values():
            for m in comp.methods:
                yield comp, m

    def iter_endpoints(self) -> Iterator[Endpoint]:
        for comp in self.components.values():
            yield from comp.endpoints

    def iter_rest_calls(self) -> Iterator[RestCall]:
        for _, m in self.iter_methods():
            yield from m.rest_calls

    def entities(self) -> Iterator[tuple[Component, Entity]]:
        for comp in self.components.values():
            if comp.entity_ref is not None:
                yield comp, comp.entity_ref


def validate_microservice_ir(ir: MicroserviceIR) -> list[str]:
    """Check structural invariants; returns non-fatal warnings.

    Broken references are errors; duplicate (verb, path) endpoint pairs
    within the service are reported as warnings because dropping either
    one would corrupt component content hashes.
    """
    for cid, comp in ir.components.items():
        if comp.id != cid:
            raise ValueError(f"component keyed as {cid} carries id {comp.id}")
        if cid.microservice != ir.name:
            raise ValueError(f"{cid} does not belong to service {ir.name}")
    for a, b in ir.call_graph_edges:
        if a not in ir.components or b not in ir.components:
            raise ValueError(f"call edge ({a}, {b}) references unknown components")
    warnings: list[str] = []
    seen: dict[tuple[str, str], Endpoint] = {}
    for ep in ir.iter_endpoints():
        key = (ep.http_method, ep.path)
        if key in seen:
            warnings.append(
                f"{ir.name}: duplicate endpoint {ep.http_method} {ep.path} "
                f"({seen[key].owning_component} vs {ep.owning_component})"
            )
        else:
            seen[key] = ep
    return warnings


@dataclass(frozen=True)
class RemoteCallEvidence:
    rest_call: RestCall
    endpoint: Endpoint


@dataclass(frozen=True)
class OverlapEvidence:
    similarity: float


@dataclass(frozen=True)
class DependencyEdge:
    """Cross-service dependency: a matched remote call or a data overlap."""

    kind: EdgeKind
    source: ComponentId
    target: ComponentId
    evidence: RemoteCallEvidence | OverlapEvidence

    def __post_init__(self):
        if self.source.microservice == self.target.microservice:
            raise ValueError(
                f"cross edge endpoints are in the same service: {self.source}"
            )


@dataclass(frozen=True)
class SystemIR:
    version_label: str
    services: Mapping[str, MicroserviceIR]
    cross_edges: frozenset[DependencyEdge]

    def component(self, cid: ComponentId) -> Component | None:
        svc = self.services.get(cid.microservice)
        if svc is None:
            return None
        return svc.components.get(cid)

    def iter_components(self) -> Iterator[Component]:
        for name in sorted(self.services):
            yield from self.services[name].components.values()

    def iter_endpoints(self) -> Iterator[Endpoint]:
        for name in sorted(self.services):
            yield from self.services[name].iter_endpoints()

    def iter_rest_calls(self) -> Iterator[RestCall]:
        for name in sorted(self.services):
            yield from self.services[name].iter_rest_calls()


def validate_system_ir(system: SystemIR) -> None:
    for name, svc in system.services.items():
        if svc.name != name:
            raise ValueError(f"service keyed as {name} carries name {svc.name}")
        validate_microservice_ir(svc)
    for edge in system.cross_edges:
        for end in (edge.source, edge.target):
            if system.component(end) is None:
                raise ValueError(f"cross edge references unknown component {end}")


def system_version_label(services: Mapping[str, MicroserviceIR]) -> str:
    """Render the per-service version map into one label string."""
    return ",".join(f"{name}@{services[name].version_id}" for name in sorted(services))


def ir_content_digest(ir: MicroserviceIR) -> str:
    """Short content-derived version id for one service IR.

    Unchanged sources yield the same digest no matter which checkout they
    were read from, which keeps incremental and from-scratch reconstruction
    label-identical.
    """
    lines = [ir.name]
    for cid in sorted(ir.components):
        lines.append(f"{cid}|{ir.components[cid].content_hash}")
    return _sha256("\n".join(lines))[:12]


def with_content_version(ir: MicroserviceIR) -> MicroserviceIR:
    """The same IR, versioned by its own content digest."""
    return MicroserviceIR(
        name=ir.name,
        version_id=ir_content_digest(ir),
        components=ir.components,
        call_graph_edges=ir.call_graph_edges,
    )


# ---------------------------------------------------------------------------
# Deltas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentChange:
    kind: ChangeKind
    component_id: ComponentId
    new_component: Component | None = None
    old_content_hash: str | None = None


@dataclass(frozen=True)
class Delta:
    """Ordered component-level changes between two versions of one service."""

    microservice: str
    old_version_id: str
    new_version_id: str
    changes: tuple[ComponentChange, ...] = ()

    def change_ids(self) -> frozenset[ComponentId]:
        return frozenset(c.component_id for c in self.changes)

    def is_empty(self) -> bool:
        return not self.changes


def make_delta(
    microservice: str,
    old_version_id: str,
    new_version_id: str,
    changes: Iterable[ComponentChange],
) -> Delta:
    """Canonical Delta constructor: validates entries, sorts by component id."""
    ordered = tuple(sorted(changes, key=lambda c: str(c.component_id)))
    seen: set[ComponentId] = set()
    for ch in ordered:
        if ch.component_id in seen:
            raise ValueError(f"component {ch.component_id} appears twice in delta")
        seen.add(ch.component_id)
        if ch.component_id.microservice != microservice:
            raise ValueError(
                f"{ch.component_id} does not belong to service {microservice}"
            )
        if ch.kind in (ChangeKind.ADD, ChangeKind.MODIFY):
            if ch.new_component is None:
                raise ValueError(f"{ch.kind.value} entry must carry the new component")
            if ch.new_component.id != ch.component_id:
                raise ValueError(f"change id {ch.component_id} != component id")
        else:
            if ch.new_component is not None:
                raise ValueError("DELETE entry must not carry a component")
        if ch.kind in (ChangeKind.MODIFY, ChangeKind.DELETE):
            if not ch.old_content_hash:
                raise ValueError(f"{ch.kind.value} entry must carry the old hash")
        elif ch.old_content_hash is not None:
            raise ValueError("ADD entry must not carry an old hash")
    return Delta(microservice, old_version_id, new_version_id, ordered)
