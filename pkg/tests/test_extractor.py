from __future__ import annotations

import pytest

from corpus import ACCOUNT_ENTITY, ORDER_SERVICE_V0

from archdelta.errors import AmbiguousMarkerError
from archdelta.extractor import (
    ScanWarning,
    classify_source_unit,
    discover_services,
    extract_endpoints,
    extract_entity,
    extract_rest_calls,
    parse_unit,
    scan_repository,
)
from archdelta.documents import serialize_microservice_ir
from archdelta.model import UNRESOLVED, ComponentType, component_id
from archdelta.profiles import default_profile

PROFILE = default_profile()


def test_empty_directory_yields_empty_ir(tmp_path):
    ir = scan_repository(tmp_path, PROFILE, "svc", "v0")
    assert ir.components == {}
    assert ir.call_graph_edges == frozenset()


def test_fixture_service_extraction(history_versions):
    # Hand-count for ts-station at v0: one controller with two endpoints,
    # one service, one repository, one entity; controller calls the service,
    # the service calls the repository.
    ir = scan_repository(
        history_versions[0] / "ts-station", PROFILE, "ts-station", "v0"
    )
    by_type = {}
    for cid in ir.components:
        by_type.setdefault(cid.component_type, []).append(cid)
    assert len(ir.components) == 4
    assert {t: len(v) for t, v in by_type.items()} == {
        ComponentType.CONTROLLER: 1,
        ComponentType.SERVICE: 1,
        ComponentType.REPOSITORY: 1,
        ComponentType.ENTITY: 1,
    }
    controller = by_type[ComponentType.CONTROLLER][0]
    service = by_type[ComponentType.SERVICE][0]
    repository = by_type[ComponentType.REPOSITORY][0]
    assert (controller, service) in ir.call_graph_edges
    assert (service, repository) in ir.call_graph_edges
    endpoints = sorted(
        (e.http_method, e.path) for e in ir.iter_endpoints()
    )
    assert endpoints == [
        ("GET", "/api/v1/stations"),
        ("GET", "/api/v1/stations/{*}"),
    ]


def test_unparseable_file_degrades_to_warning(tmp_path):
    good = tmp_path / "src" / "A.java"
    good.parent.mkdir(parents=True)
    good.write_text(
        "package p;\n@Service\npublic class A { public void go() { } }\n"
    )
    for i in range(4):
        (tmp_path / "src" / f"B{i}.java").write_text(
            f"package p;\n@Service\npublic class B{i} {{ public void go() {{ }} }}\n"
        )
    (tmp_path / "src" / "Broken.java").write_text(
        "package p;\n@Service\npublic class Broken { public void x() { \n"
    )
    warnings: list[ScanWarning] = []
    ir = scan_repository(tmp_path, PROFILE, "svc", "v0", warnings=warnings)
    assert len(ir.components) == 5
    assert len(warnings) == 1
    assert "Broken" in warnings[0].path


def test_classify_controller_marker():
    text = "package p;\n@RestController\npublic class C { }\n"
    assert classify_source_unit(text, PROFILE) is ComponentType.CONTROLLER


def test_classify_unmarked_unit_is_none():
    text = "package p;\npublic class Plain { private int x; }\n"
    assert classify_source_unit(text, PROFILE) is None


def test_classify_conflicting_markers_raises():
    text = "package p;\n@Service\n@Repository\npublic class Confused { }\n"
    with pytest.raises(AmbiguousMarkerError):
        classify_source_unit(text, PROFILE)


def test_endpoint_base_path_concatenation_and_variables():
    text = (
        "package p;\n@RestController\n@RequestMapping(\"/api/v1/orders\")\n"
        "public class C {\n"
        "    @GetMapping(\"/{id}\")\n"
        "    public Order get(@PathVariable String id) { return null; }\n"
        "}\n"
    )
    unit = parse_unit(text)
    cid = component_id("svc", ComponentType.CONTROLLER, unit.qualified_name)
    eps = extract_endpoints(unit, PROFILE, cid)
    assert [(e.http_method, e.path, e.handler_method) for e in eps] == [
        ("GET", "/api/v1/orders/{*}", "get")
    ]


def test_endpoint_composite_marker_reads_method_attribute():
    text = (
        "package p;\n@RestController\n@RequestMapping(\"/api\")\n"
        "public class C {\n"
        "    @RequestMapping(value = \"/create\", method = RequestMethod.POST)\n"
        "    public String create() { return null; }\n"
        "}\n"
    )
    unit = parse_unit(text)
    cid = component_id("svc", ComponentType.CONTROLLER, unit.qualified_name)
    eps = extract_endpoints(unit, PROFILE, cid)
    assert [(e.http_method, e.path) for e in eps] == [("POST", "/api/create")]


def test_controller_without_annotated_methods_has_no_endpoints():
    text = (
        "package p;\n@RestController\npublic class C {\n"
        "    public String helper() { return null; }\n"
        "}\n"
    )
    unit = parse_unit(text)
    cid = component_id("svc", ComponentType.CONTROLLER, unit.qualified_name)
    assert extract_endpoints(unit, PROFILE, cid) == []


def test_rest_call_with_literal_host():
    unit = parse_unit(ORDER_SERVICE_V0)
    cid = component_id("ts-order", ComponentType.SERVICE, unit.qualified_name)
    calls = extract_rest_calls(unit, PROFILE, cid)
    assert [(c.http_method, c.target_service, c.path) for c in calls] == [
        ("GET", "ts-station", "/api/v1/stations/{*}")
    ]
    assert calls[0].site_method == "order.OrderService.getOrder"


def test_rest_call_with_variable_host_is_unresolved():
    text = (
        "package p;\n@Service\npublic class S {\n"
        "    private RestTemplate restTemplate;\n"
        "    public Price quote(String host) {\n"
        "        return restTemplate.getForObject(host + \"/api/v1/price\", Price.class);\n"
        "    }\n"
        "}\n"
    )
    unit = parse_unit(text)
    cid = component_id("svc", ComponentType.SERVICE, unit.qualified_name)
    calls = extract_rest_calls(unit, PROFILE, cid)
    assert [(c.http_method, c.target_service, c.path) for c in calls] == [
        ("GET", UNRESOLVED, "/api/v1/price")
    ]


def test_unit_without_remote_calls_yields_none():
    text = (
        "package p;\n@Service\npublic class S {\n"
        "    public int add(int a, int b) { return a + b; }\n"
        "}\n"
    )
    unit = parse_unit(text)
    cid = component_id("svc", ComponentType.SERVICE, unit.qualified_name)
    assert extract_rest_calls(unit, PROFILE, cid) == []


def test_entity_account_fields():
    unit = parse_unit(ACCOUNT_ENTITY)
    entity = extract_entity(unit)
    assert entity.name == "Account"
    assert sorted(f.field_name for f in entity.fields) == ["id", "money", "userId"]


def test_entity_excludes_static_and_transient():
    text = (
        "package p;\n@Entity\npublic class E {\n"
        "    public static final String TABLE = \"e\";\n"
        "    private transient int scratch;\n"
        "    @Transient\n    private int cached;\n"
        "    private String id;\n"
        "    private String name;\n"
        "}\n"
    )
    entity = extract_entity(parse_unit(text))
    assert sorted(f.field_name for f in entity.fields) == ["id", "name"]


def test_entity_without_fields_warns(tmp_path):
    (tmp_path / "E.java").write_text(
        "package p;\n@Entity\npublic class E { }\n"
    )
    warnings: list[ScanWarning] = []
    ir = scan_repository(tmp_path, PROFILE, "svc", "v0", warnings=warnings)
    assert len(ir.components) == 1
    assert any("no instance fields" in w.message for w in warnings)


def test_scan_is_deterministic(history_versions):
    root = history_versions[0] / "ts-order"
    first = serialize_microservice_ir(scan_repository(root, PROFILE, "ts-order", "v0"))
    second = serialize_microservice_ir(scan_repository(root, PROFILE, "ts-order", "v0"))
    assert first == second


def test_extraction_cache_reproduces_uncached_scan(history_versions):
    root = history_versions[0] / "ts-order"
    cache: dict = {}
    cached_once = scan_repository(root, PROFILE, "ts-order", "v0", cache=cache)
    cached_twice = scan_repository(root, PROFILE, "ts-order", "v0", cache=cache)
    plain = scan_repository(root, PROFILE, "ts-order", "v0")
    assert (
        serialize_microservice_ir(cached_once)
        == serialize_microservice_ir(cached_twice)
        == serialize_microservice_ir(plain)
    )


def test_discover_services_multi_module(history_versions):
    found = discover_services(history_versions[0])
    assert [name for name, _ in found] == ["ts-order", "ts-station", "ts-user"]


def test_discover_services_name_override(history_versions):
    found = discover_services(history_versions[0], {"ts-order": "orders"})
    assert [name for name, _ in found] == ["orders", "ts-station", "ts-user"]


def test_discover_services_plain_tree_is_single_service(tmp_path):
    (tmp_path / "src").mkdir()
    found = discover_services(tmp_path)
    assert found == [(tmp_path.name, tmp_path)]


def test_paths_are_normalized_after_scan(history_versions):
    ir = scan_repository(
        history_versions[0] / "ts-user", PROFILE, "ts-user", "v0"
    )
    for ep in ir.iter_endpoints():
        assert ep.path.startswith("/")
        assert "{id}" not in ep.path
    for call in ir.iter_rest_calls():
        assert call.path.startswith("/")
        assert "{" not in call.path or "{*}" in call.path
