from .document import (
    FORMAT_VERSION,
    SYSTEM_NAME,
    DataNode,
    Mode,
    MrdiDocument,
    NamespaceRecord,
    TypeNode,
    document_dependencies,
    is_uuid_text,
    iter_type_uuids,
    validate_document,
)
from .states import DeserializerState, GlobalSerializerState, SerializerState
from .codec import (
    context_ref_document,
    encode_univariate,
    load,
    register_codec,
    register_context,
    registered_type_tags,
    save,
)
from .textio import parse_text, read_file, serialize_text, write_file

__all__ = [
    "DataNode",
    "DeserializerState",
    "FORMAT_VERSION",
    "GlobalSerializerState",
    "Mode",
    "MrdiDocument",
    "NamespaceRecord",
    "SYSTEM_NAME",
    "SerializerState",
    "TypeNode",
    "context_ref_document",
    "document_dependencies",
    "encode_univariate",
    "is_uuid_text",
    "iter_type_uuids",
    "load",
    "parse_text",
    "read_file",
    "register_codec",
    "register_context",
    "registered_type_tags",
    "save",
    "serialize_text",
    "validate_document",
    "write_file",
]
