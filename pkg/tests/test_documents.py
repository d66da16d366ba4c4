from __future__ import annotations

import json

import pytest
from hypothesis import given, settings

from strategies import ir_chains, system_irs

from archdelta.delta import compute_delta
from archdelta.documents import (
    deserialize_delta,
    deserialize_ir,
    deserialize_microservice_ir,
    serialize_delta,
    serialize_ir,
    serialize_microservice_ir,
)
from archdelta.errors import DocumentError
from archdelta.linker import build_system_ir


def test_empty_system_round_trips():
    system = build_system_ir([])
    data = serialize_ir(system)
    back = deserialize_ir(data)
    assert back == system
    assert back.services == {}


@given(system_irs())
@settings(max_examples=60, deadline=None)
def test_round_trip_is_identity(system):
    assert deserialize_ir(serialize_ir(system)) == system


@given(system_irs())
@settings(max_examples=60, deadline=None)
def test_serialization_is_byte_stable(system):
    once = serialize_ir(system)
    twice = serialize_ir(deserialize_ir(once))
    assert once == twice


def test_cross_edge_to_missing_component_is_rejected():
    system = build_system_ir([])
    doc = json.loads(serialize_ir(system))
    doc["crossEdges"] = [
        {
            "kind": "DataOverlap",
            "source": {
                "microservice": "ghost",
                "componentType": "Entity",
                "qualifiedName": "pkg.A",
            },
            "target": {
                "microservice": "other",
                "componentType": "Entity",
                "qualifiedName": "pkg.B",
            },
            "evidence": {"similarity": 1.0},
        }
    ]
    with pytest.raises(DocumentError):
        deserialize_ir(json.dumps(doc))


def test_tampered_component_hash_is_rejected(history_versions):
    from archdelta.extractor import scan_repository
    from archdelta.profiles import default_profile

    ir = scan_repository(
        history_versions[0] / "ts-order", default_profile(), "ts-order", "v0"
    )
    doc = json.loads(serialize_microservice_ir(ir))
    doc["components"][0]["contentHash"] = "0" * 64
    with pytest.raises(DocumentError) as excinfo:
        deserialize_microservice_ir(json.dumps(doc))
    assert "contentHash" in str(excinfo.value)


def test_malformed_document_reports_location():
    with pytest.raises(DocumentError) as excinfo:
        deserialize_ir(b"{not json")
    assert excinfo.value.location == "$"


@given(ir_chains(length=1))
@settings(max_examples=40, deadline=None)
def test_delta_round_trips(chain):
    old, new = chain[0], chain[1]
    d = compute_delta(old, new)
    assert deserialize_delta(serialize_delta(d)) == d


def test_delta_accepts_remove_alias(history_versions):
    from archdelta.extractor import scan_repository
    from archdelta.profiles import default_profile

    old = scan_repository(
        history_versions[4] / "ts-user", default_profile(), "ts-user", "v4"
    )
    new = scan_repository(
        history_versions[5] / "ts-user", default_profile(), "ts-user", "v5"
    )
    d = compute_delta(old, new)
    doc = json.loads(serialize_delta(d))
    kinds = [c["changeKind"] for c in doc["changes"]]
    assert kinds == ["DELETE"]
    doc["changes"][0]["changeKind"] = "REMOVE"
    assert deserialize_delta(json.dumps(doc)) == d


def test_unknown_schema_tag_is_rejected():
    with pytest.raises(DocumentError) as excinfo:
        deserialize_ir(json.dumps({"schema": "bogus@9"}))
    assert excinfo.value.location == "$.schema"
