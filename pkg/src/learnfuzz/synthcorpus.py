"""Seeded synthetic corpus of small text-only PDF objects.

Stands in for a real extracted-object corpus: dictionaries with
/Type /Kids /Count, arrays of numbers, literal strings, names with
#-escapes, cross-object references and multi-type arrays.  Objects are
built as ASTs and rendered with the reference serializer, so every
generated body parses cleanly under the strict oracle.  The shapes are
deliberately repetitive so that small models can learn the format.
"""

from __future__ import annotations

import random

from .corpus import ObjectRecord
from .pdfcore import (
    Array,
    Boolean,
    Dictionary,
    LiteralString,
    Name,
    Number,
    PdfValue,
    Ref,
    serialize_value,
)

_WORDS = ["Hello", "World", "Related", "Work", "Index", "Title", "Sample", "Notes"]

_BASE_FONTS = ["Helvetica", "Courier", "Times"]

_ESCAPED_NAMES = ["My Name", "Font Dir", "Page One"]

_MEDIA_BOXES = [(612, 792), (595, 842), (420, 595)]


def _real(rng: random.Random) -> Number:
    return Number(rng.randrange(0, 100) + rng.randrange(0, 10) / 10)


def _int(rng: random.Random, hi: int = 100) -> Number:
    return Number(rng.randrange(0, hi))


def _ref(rng: random.Random) -> Ref:
    return Ref(rng.randrange(1, 10), 0)


def _string(rng: random.Random) -> LiteralString:
    return LiteralString(" ".join(rng.choices(_WORDS, k=rng.randrange(1, 3))))


def _name(rng: random.Random) -> Name:
    if rng.random() < 0.25:
        return Name(rng.choice(_ESCAPED_NAMES))
    return Name(rng.choice(_WORDS))


def _number_array(rng: random.Random) -> Array:
    k = rng.randrange(2, 4)
    make = _real if rng.random() < 0.7 else _int
    return Array([make(rng) for _ in range(k)])


def _multi_array(rng: random.Random) -> Array:
    return Array([Boolean(rng.random() < 0.5), _int(rng, 500), _real(rng),
                  _string(rng), _name(rng)])


def _pages_dict(rng: random.Random) -> Dictionary:
    kids = Array([_ref(rng) for _ in range(rng.randrange(1, 3))])
    return Dictionary({"Type": Name("Pages"), "Kids": kids, "Count": Number(len(kids.items))})


def _page_dict(rng: random.Random) -> Dictionary:
    w, h = rng.choice(_MEDIA_BOXES)
    return Dictionary({
        "Type": Name("Page"),
        "Parent": _ref(rng),
        "MediaBox": Array([Number(0), Number(0), Number(w), Number(h)]),
    })


def _font_dict(rng: random.Random) -> Dictionary:
    return Dictionary({
        "Type": Name("Font"),
        "Subtype": Name("Type1"),
        "BaseFont": Name(rng.choice(_BASE_FONTS)),
    })


def _info_dict(rng: random.Random) -> Dictionary:
    return Dictionary({"Title": _string(rng), "Author": _string(rng)})


def _object_value(rng: random.Random) -> PdfValue:
    r = rng.random()
    if r < 0.15:
        return _pages_dict(rng)
    if r < 0.25:
        return _page_dict(rng)
    if r < 0.33:
        return _font_dict(rng)
    if r < 0.40:
        return _info_dict(rng)
    if r < 0.60:
        return _number_array(rng)
    if r < 0.72:
        return _string(rng)
    if r < 0.87:
        return _int(rng) if rng.random() < 0.5 else _real(rng)
    if r < 0.95:
        return _multi_array(rng)
    return _name(rng)


def generate_corpus(n_objects: int = 5000, seed: int = 1) -> list[ObjectRecord]:
    """Deterministically generate ``n_objects`` well-formed object records."""
    rng = random.Random(seed)
    records = []
    for k in range(n_objects):
        oid = rng.randrange(1, 100)
        value = _object_value(rng)
        sep1 = " " if rng.random() < 0.6 else "\n"
        sep2 = " " if rng.random() < 0.5 else "\n"
        body = f"{oid} 0 obj{sep1}{serialize_value(value)}{sep2}endobj"
        records.append(ObjectRecord(oid, 0, body, "synthetic"))
    return records
