import pytest

from mrdikit.errors import SchemaError
from mrdikit.mrdi import (
    Mode,
    MrdiDocument,
    NamespaceRecord,
    TypeNode,
    parse_text,
    serialize_text,
    validate_document,
)

UUID_A = "11111111-2222-4333-8444-555555555555"
UUID_B = "66666666-7777-4888-9999-aaaaaaaaaaaa"


def ring_ref(base, symbol):
    return MrdiDocument(TypeNode("PolyRing"), {"base_ring": base, "symbol": symbol})


def test_valid_longterm_document_passes():
    doc = MrdiDocument(
        TypeNode("PolyRingElem", UUID_A),
        [["0", "1"]],
        ns=NamespaceRecord(),
        refs={UUID_A: ring_ref("ZZRing", "t")},
    )
    assert validate_document(doc) == []


def test_cyclic_refs_detected():
    doc = MrdiDocument(
        TypeNode("PolyRingElem", UUID_A),
        [],
        ns=NamespaceRecord(),
        refs={
            UUID_A: ring_ref(UUID_B, "t"),
            UUID_B: ring_ref(UUID_A, "u"),
        },
    )
    errors = validate_document(doc)
    assert any("cyclic reference" in e for e in errors)


def test_mode_violation_refs_without_ns():
    doc = MrdiDocument(TypeNode("ZZRingElem"), "1", refs={})
    errors = validate_document(doc)
    assert any("mode violation" in e for e in errors)


def test_dangling_uuid_reported():
    doc = MrdiDocument(
        TypeNode("PolyRingElem", UUID_A),
        [],
        ns=NamespaceRecord(),
        refs={},
    )
    errors = validate_document(doc)
    assert any("dangling reference" in e and UUID_A in e for e in errors)


def test_unknown_tag_reported():
    doc = MrdiDocument(TypeNode("Frobnicator"), "1", ns=NamespaceRecord(), refs={})
    errors = validate_document(doc)
    assert any("unknown type tag" in e for e in errors)


def test_errors_accumulate():
    doc = MrdiDocument(
        TypeNode("Frobnicator", UUID_A),
        "1",
        refs={},  # also a mode violation: refs without ns
    )
    errors = validate_document(doc)
    assert len(errors) >= 3  # unknown tag, mode violation, dangling uuid


def test_ipc_document_mode():
    doc = MrdiDocument(TypeNode("ZZRingElem"), "5")
    assert doc.mode is Mode.IPC
    assert validate_document(doc) == []


# -- byte form ----------------------------------------------------------------


def test_parse_rejects_native_numbers():
    with pytest.raises(SchemaError, match="native value"):
        parse_text(b'{"_type": "ZZRingElem", "data": 5}')


def test_parse_rejects_unknown_top_level_keys():
    with pytest.raises(SchemaError, match="unknown keys"):
        parse_text(b'{"_type": "ZZRingElem", "data": "5", "banana": "1"}')


def test_parse_rejects_missing_type():
    with pytest.raises(SchemaError, match="missing"):
        parse_text(b'{"data": "5"}')


def test_parse_rejects_malformed_json():
    with pytest.raises(SchemaError, match="malformed JSON"):
        parse_text(b"{nope")


def test_parse_rejects_refs_inside_refs():
    raw = (
        b'{"_ns": {"system": "s", "version": "1"}, "_type": "ZZRingElem",'
        b' "_refs": {"' + UUID_A.encode() + b'": {"_type": "PolyRing", "_refs": {},'
        b' "data": {}}}, "data": "5"}'
    )
    with pytest.raises(SchemaError, match="ref documents"):
        parse_text(raw)


def test_serialize_parse_identity_on_documents():
    doc = MrdiDocument(
        TypeNode("PolyRingElem", UUID_A),
        [["0", "2"], ["3", "1"]],
        ns=NamespaceRecord(),
        refs={UUID_A: ring_ref("ZZRing", "t")},
    )
    assert parse_text(serialize_text(doc)) == doc


def test_serialize_is_stable_bytes():
    doc = MrdiDocument(TypeNode("ZZRingElem"), "42", ns=NamespaceRecord(), refs={})
    assert serialize_text(doc) == serialize_text(doc)
    assert serialize_text(doc).endswith(b"\n")


def test_ipc_serialization_is_compact():
    doc = MrdiDocument(TypeNode("ZZRingElem"), "42")
    raw = serialize_text(doc)
    assert b" " not in raw and b"\n" not in raw
    assert b"_ns" not in raw and b"_refs" not in raw
