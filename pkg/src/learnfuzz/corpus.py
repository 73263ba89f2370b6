"""Extract non-binary PDF objects from files and build fixed-size training windows."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

OBJECT_SEPARATOR = "%%OBJ%%"

_OBJ_START = re.compile(r"(\d+)[ \t]+(\d+)[ \t]+obj\b")


class CorpusTooSmallError(Exception):
    pass


@dataclass(frozen=True)
class ObjectRecord:
    """One extracted non-binary PDF object.

    ``body`` spans the id line through ``endobj`` inclusive and never
    contains the ``stream`` keyword.
    """
    object_id: int
    generation: int
    body: str
    source: str = ""


@dataclass
class TrainingSet:
    text: str
    window_size: int
    windows: list[tuple[str, str]]


def extract_objects(file_bytes: bytes, source: str = "") -> list[ObjectRecord]:
    """Best-effort textual scan for ``<id> <gen> obj ... endobj`` regions.

    Regions whose interior contains the ``stream`` keyword are skipped
    entirely (binary objects are out of scope).  Never fails on malformed
    input; unmatched regions are simply not returned.  Scanning is greedy
    from each start match to the nearest following ``endobj``; nested
    ``obj`` tokens inside string literals are not special-cased.
    """
    text = file_bytes.decode("latin-1")
    records: list[ObjectRecord] = []
    pos = 0
    while True:
        m = _OBJ_START.search(text, pos)
        if m is None:
            break
        end = text.find("endobj", m.end())
        if end == -1:
            break
        body = text[m.start():end + len("endobj")]
        pos = end + len("endobj")
        if "stream" in body:
            continue
        records.append(ObjectRecord(int(m.group(1)), int(m.group(2)), body, source))
    return records


def extract_from_paths(paths: Iterable[Path]) -> list[ObjectRecord]:
    records: list[ObjectRecord] = []
    for path in paths:
        records.extend(extract_objects(Path(path).read_bytes(), str(path)))
    return records


def concat_bodies(bodies: Iterable[str]) -> str:
    """Concatenate object bodies, one trailing newline each for token separation."""
    return "".join(body + "\n" for body in bodies)


def build_windows(objects: list[ObjectRecord], d: int) -> TrainingSet:
    """Split the concatenated corpus into (input, shifted-target) windows of size d.

    Window i has input s[i*d:(i+1)*d] and target s[i*d+1:(i+1)*d+1]; a trailing
    fragment shorter than d+1 characters is discarded.
    """
    if d < 1:
        raise ValueError(f"window size must be >= 1, got {d}")
    text = concat_bodies(rec.body for rec in objects)
    if len(text) < d + 1:
        raise CorpusTooSmallError(
            f"corpus has {len(text)} characters; need at least {d + 1} for window size {d}")
    count = (len(text) - 1) // d
    windows = [(text[i * d:(i + 1) * d], text[i * d + 1:(i + 1) * d + 1])
               for i in range(count)]
    return TrainingSet(text, d, windows)


def filter_records(records: list[ObjectRecord],
                   min_len: Optional[int] = None,
                   max_len: Optional[int] = None) -> list[ObjectRecord]:
    out = records
    if min_len is not None:
        out = [r for r in out if len(r.body) >= min_len]
    if max_len is not None:
        out = [r for r in out if len(r.body) <= max_len]
    return out


def write_objects_file(bodies: Iterable[str], path: Path) -> int:
    """Write bodies separated by a newline plus a %%OBJ%% record-separator line."""
    n = 0
    with open(path, "w", encoding="latin-1", newline="") as fh:
        for body in bodies:
            fh.write(body)
            fh.write("\n" + OBJECT_SEPARATOR + "\n")
            n += 1
    return n


def read_objects_file(path: Path) -> list[str]:
    text = Path(path).read_text(encoding="latin-1")
    if not text:
        return []
    chunks = text.split("\n" + OBJECT_SEPARATOR + "\n")
    if chunks and chunks[-1] == "":
        chunks.pop()
    return chunks
