"""Append generated objects to well-formed host PDFs via incremental update."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .pdfcore import (
    Array,
    Boolean,
    Dictionary,
    HexString,
    HostStructure,
    LiteralString,
    Name,
    Number,
    Ref,
    Trailer,
    XrefTable,
    parse_host,
    serialize_value,
)


class ObjectBodyUnusableError(Exception):
    pass


@dataclass
class HostFile:
    bytes: bytes
    structure: HostStructure

    @property
    def last_trailer(self) -> Trailer:
        return self.structure.last_trailer

    @property
    def last_object_id(self) -> int:
        return self.structure.last_object_id

    @classmethod
    def load(cls, file_bytes: bytes) -> "HostFile":
        return cls(file_bytes, parse_host(file_bytes))


_FULL_BODY = re.compile(r"^\s*(\d+)\s+(\d+)\s+(obj\b.*)$", re.S)
_BARE_BODY = re.compile(r"^\s*(obj\b.*)$", re.S)


def _normalise_body(object_body: str, object_id: int, generation: int) -> str:
    """Rewrite the id line (or prepend one) so the body reads ``<id> <gen> obj ...``."""
    if "endobj" not in object_body:
        raise ObjectBodyUnusableError("object body has no 'endobj' marker")
    m = _FULL_BODY.match(object_body)
    if m is not None:
        return f"{object_id} {generation} {m.group(3)}"
    m = _BARE_BODY.match(object_body)
    if m is not None:
        return f"{object_id} {generation} {m.group(1)}"
    raise ObjectBodyUnusableError("object body has no leading 'obj' marker")


def append_object(host: HostFile, object_body: str) -> bytes:
    """Pure append: new body section overriding the host's last object id.

    The appended section is the rewritten object, a one-entry xref table
    recording its exact byte offset, and a trailer copying the previous
    trailer dict with /Prev pointing at the previous xref.  The host
    prefix bytes are never modified.
    """
    oid = host.last_object_id
    gen, _, _ = host.structure.resolve(oid, host.bytes.decode("latin-1"))
    new_gen = gen + 1
    body_text = _normalise_body(object_body, oid, new_gen)

    out = bytearray(host.bytes)
    if not out.endswith(b"\n"):
        out += b"\n"
    obj_offset = len(out)
    out += body_text.encode("latin-1")
    if not out.endswith(b"\n"):
        out += b"\n"

    xref_offset = len(out)
    table = XrefTable([(oid, [(obj_offset, new_gen, "n")])])
    out += table.serialize().encode("latin-1")

    prev_startxref = host.structure.bodies[-1].trailer.startxref
    trailer_entries = dict(host.last_trailer.dict.entries)
    trailer_entries["Prev"] = Number(prev_startxref)
    trailer_text = serialize_value(Dictionary(trailer_entries))
    out += b"trailer\n" + trailer_text.encode("latin-1") + b"\n"
    out += f"startxref\n{xref_offset}\n%%EOF\n".encode("latin-1")
    return bytes(out)


# ---------------------------------------------------------------------------
# Bundled host fixtures
# ---------------------------------------------------------------------------

def _serialize_body(objects: list[tuple[int, int, str]],
                    trailer: Dictionary,
                    subsection_split: int | None = None,
                    header: bool = True) -> bytes:
    """Build a single-body PDF file from (id, gen, content) triples."""
    out = bytearray()
    if header:
        out += b"%PDF-1.4\n"
    offsets: dict[int, tuple[int, int]] = {}
    for oid, gen, content in objects:
        offsets[oid] = (len(out), gen)
        out += f"{oid} {gen} obj\n{content}\nendobj\n".encode("latin-1")
    xref_offset = len(out)
    ids = sorted(offsets)
    groups: list[list[int]] = [[0] + ids] if subsection_split is None else [
        [0] + [i for i in ids if i < subsection_split],
        [i for i in ids if i >= subsection_split],
    ]
    subsections = []
    for group in groups:
        start = group[0]
        entries = []
        for oid in group:
            if oid == 0:
                entries.append((0, 65535, "f"))
            else:
                off, gen = offsets[oid]
                entries.append((off, gen, "n"))
        subsections.append((start, entries))
    out += XrefTable(subsections).serialize().encode("latin-1")
    out += b"trailer\n" + serialize_value(trailer).encode("latin-1") + b"\n"
    out += f"startxref\n{xref_offset}\n%%EOF\n".encode("latin-1")
    return bytes(out)


def make_hosts() -> tuple[HostFile, HostFile, HostFile]:
    """Three deterministic, structurally distinct well-formed hosts.

    host1: minimal 1-page file, 6 objects, single subsection, /Info in trailer.
    host2: two xref subsections (sparse ids), no /Info.
    host3: built by one incremental update, so its xref chain has a /Prev link.
    """
    host1_objects = [
        (1, 0, serialize_value(Dictionary({"Type": Name("Catalog"), "Pages": Ref(2, 0)}))),
        (2, 0, serialize_value(Dictionary({"Type": Name("Pages"), "Kids": Array([Ref(3, 0)]), "Count": Number(1)}))),
        (3, 0, serialize_value(Dictionary({
            "Type": Name("Page"), "Parent": Ref(2, 0),
            "MediaBox": Array([Number(0), Number(0), Number(612), Number(792)]),
            "Resources": Dictionary({"Font": Dictionary({"F1": Ref(4, 0)})}),
        }))),
        (4, 0, serialize_value(Dictionary({"Type": Name("Font"), "Subtype": Name("Type1"),
                                           "BaseFont": Name("Helvetica")}))),
        (5, 0, serialize_value(Dictionary({"Title": LiteralString("Minimal Host"),
                                           "Creator": Name("My Maker")}))),
    ]
    host1_trailer = Dictionary({"Size": Number(6), "Root": Ref(1, 0), "Info": Ref(5, 0)})
    host1 = HostFile.load(_serialize_body(host1_objects, host1_trailer))

    host2_objects = [
        (1, 0, serialize_value(Dictionary({"Type": Name("Catalog"), "Pages": Ref(2, 0)}))),
        (2, 0, serialize_value(Dictionary({"Type": Name("Pages"), "Kids": Array([Ref(7, 0)]), "Count": Number(1)}))),
        (7, 0, serialize_value(Dictionary({
            "Type": Name("Page"), "Parent": Ref(2, 0),
            "MediaBox": Array([Number(0), Number(0), Number(595), Number(842)]),
        }))),
        (8, 0, serialize_value(HexString(b"\xde\xad\xbe\xef"))),
        (9, 0, serialize_value(Array([Boolean(False), Number(170), Number(85.5),
                                       LiteralString("Hello"), Name("My Name")]))),
    ]
    host2_trailer = Dictionary({"Size": Number(10), "Root": Ref(1, 0)})
    host2 = HostFile.load(_serialize_body(host2_objects, host2_trailer, subsection_split=7))

    host3_base_objects = [
        (1, 0, serialize_value(Dictionary({"Type": Name("Catalog"), "Pages": Ref(2, 0)}))),
        (2, 0, serialize_value(Dictionary({"Type": Name("Pages"), "Kids": Array([Ref(3, 0)]), "Count": Number(1)}))),
        (3, 0, serialize_value(Dictionary({
            "Type": Name("Page"), "Parent": Ref(2, 0),
            "MediaBox": Array([Number(0), Number(0), Number(420), Number(595)]),
        }))),
        (4, 0, "4171"),
    ]
    host3_trailer = Dictionary({"Size": Number(5), "Root": Ref(1, 0)})
    host3_base = HostFile.load(_serialize_body(host3_base_objects, host3_trailer))
    host3 = HostFile.load(append_object(host3_base, "obj [680.6 680.6] endobj"))

    return host1, host2, host3
