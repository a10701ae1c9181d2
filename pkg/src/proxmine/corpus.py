"""Document/basis data model and corpus ingestion.

A corpus is a collection of documents, each an ordered sequence of typed
segments (phrases, times, locations, organizations, persons).  Entities and
normalized time strings are supplied by the producer of the input file; no
entity recognition happens here.

File format (one JSON object per line, UTF-8)::

    {"doc_id": str,
     "publish_date": "YYYY-MM-DD" | null,
     "segments": [{"pos": int, "type": "phrase" | "time" | "location" |
                   "organization" | "person", "surface": str}]}
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator, Optional

import numpy as np


class BasisType(IntEnum):
    """The five kinds of atomic content units."""

    PHRASE = 0
    TIME = 1
    LOCATION = 2
    ORGANIZATION = 3
    PERSON = 4

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "BasisType":
        try:
            return cls[label.upper()]
        except KeyError:
            raise SchemaError(f"unknown basis type {label!r}") from None


#: The four typed attribute dimensions; PHRASE is the descriptor type.
ATTRIBUTE_TYPES = (
    BasisType.TIME,
    BasisType.LOCATION,
    BasisType.ORGANIZATION,
    BasisType.PERSON,
)


class CorpusError(Exception):
    """Base class for corpus ingestion failures."""


class ParseError(CorpusError):
    """Malformed input line; the message names the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class SchemaError(CorpusError):
    """Structurally valid JSON carrying an unknown basis type."""


class DuplicateDocumentError(CorpusError):
    """The same doc_id appeared more than once."""


@dataclass(frozen=True)
class Basis:
    """One vocabulary entry: a typed, normalized surface string.

    ``id`` is the dense per-type vocabulary index, assigned in first-seen
    order.  A negative id marks a basis not yet bound to a vocabulary.
    """

    id: int
    btype: BasisType
    surface: str


@dataclass
class Document:
    """An ordered sequence of basis occurrences.

    Positions are the original segment positions and are strictly
    increasing; they survive vocabulary filtering unchanged (gaps allowed)
    so that kernel distances reflect original distances.
    """

    doc_id: str
    publish_date: Optional[datetime.date]
    segments: list[tuple[int, Basis]]

    @property
    def n_segments(self) -> int:
        return len(self.segments)


class Vocabulary:
    """Per-type basis tables with dense indices in first-seen order."""

    def __init__(self) -> None:
        self._surfaces: dict[BasisType, list[str]] = {t: [] for t in BasisType}
        self._index: dict[BasisType, dict[str, int]] = {t: {} for t in BasisType}
        self._entries: dict[BasisType, list[Basis]] = {t: [] for t in BasisType}

    def add(self, btype: BasisType, surface: str) -> Basis:
        idx = self._index[btype].get(surface)
        if idx is None:
            idx = len(self._surfaces[btype])
            self._index[btype][surface] = idx
            self._surfaces[btype].append(surface)
            self._entries[btype].append(Basis(idx, btype, surface))
        return self._entries[btype][idx]

    def id_of(self, btype: BasisType, surface: str) -> Optional[int]:
        return self._index[btype].get(surface)

    def get(self, btype: BasisType, surface: str) -> Optional[Basis]:
        idx = self._index[btype].get(surface)
        return None if idx is None else self._entries[btype][idx]

    def basis(self, btype: BasisType, idx: int) -> Basis:
        return self._entries[btype][idx]

    def surface_of(self, btype: BasisType, idx: int) -> str:
        return self._surfaces[btype][idx]

    def surfaces(self, btype: BasisType) -> list[str]:
        return list(self._surfaces[btype])

    def size(self, btype: BasisType) -> int:
        return len(self._surfaces[btype])

    @property
    def total_size(self) -> int:
        return sum(len(s) for s in self._surfaces.values())

    def global_offset(self, btype: BasisType) -> int:
        # Phrases occupy [0, |V_phrase|); attribute types follow in enum order.
        off = 0
        for t in BasisType:
            if t == btype:
                return off
            off += len(self._surfaces[t])
        raise KeyError(btype)

    def global_id(self, btype: BasisType, idx: int) -> int:
        return self.global_offset(btype) + idx

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self._surfaces == other._surfaces


@dataclass
class FlatSegments:
    """Concatenated per-document segment arrays for the network kernels.

    ``node_ids`` are global vocabulary ids (phrases first); document ``k``
    spans ``[offsets[k], offsets[k+1])``.
    """

    positions: np.ndarray
    node_ids: np.ndarray
    offsets: np.ndarray


@dataclass
class Corpus:
    """Immutable after construction; safe for concurrent reads."""

    documents: list[Document]
    vocabulary: Vocabulary
    doc_frequency: dict[BasisType, np.ndarray]
    flat: FlatSegments = field(repr=False)

    @property
    def n_documents(self) -> int:
        return len(self.documents)

    def doc_frequency_of(self, basis: Basis) -> int:
        return int(self.doc_frequency[basis.btype][basis.id])


@dataclass
class VocabStats:
    counts: dict[BasisType, int]
    n_documents: int


# A provisional segment before vocabulary binding: (pos, type, surface).
RawSegment = tuple[int, BasisType, str]


def _parse_line(line_no: int, line: str) -> tuple[str, Optional[datetime.date], list[RawSegment]]:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(line_no, f"invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise ParseError(line_no, "document record must be a JSON object")
    try:
        doc_id = obj["doc_id"]
        segments = obj["segments"]
    except KeyError as exc:
        raise ParseError(line_no, f"missing required key {exc.args[0]!r}") from None
    if not isinstance(doc_id, str) or not doc_id:
        raise ParseError(line_no, "doc_id must be a non-empty string")
    raw_date = obj.get("publish_date")
    date = None
    if raw_date is not None:
        try:
            date = datetime.date.fromisoformat(raw_date)
        except (TypeError, ValueError):
            raise ParseError(line_no, f"bad publish_date {raw_date!r}") from None
    if not isinstance(segments, list):
        raise ParseError(line_no, "segments must be a list")
    out: list[RawSegment] = []
    last_pos = 0
    for seg in segments:
        if not isinstance(seg, dict):
            raise ParseError(line_no, "segment entries must be objects")
        try:
            pos, type_label, surface = seg["pos"], seg["type"], seg["surface"]
        except KeyError as exc:
            raise ParseError(line_no, f"segment missing key {exc.args[0]!r}") from None
        if not isinstance(pos, int) or pos < 1:
            raise ParseError(line_no, f"segment pos must be a positive integer, got {pos!r}")
        if pos <= last_pos:
            raise ParseError(line_no, f"segment positions must be strictly increasing at pos {pos}")
        last_pos = pos
        if not isinstance(surface, str) or not surface:
            raise ParseError(line_no, "segment surface must be a non-empty string")
        if not isinstance(type_label, str):
            raise ParseError(line_no, "segment type must be a string")
        btype = BasisType.from_label(type_label)
        out.append((pos, btype, surface))
    return doc_id, date, out


def _flatten(documents: list[Document], vocab: Vocabulary) -> FlatSegments:
    offsets = np.zeros(len(documents) + 1, dtype=np.int64)
    total = sum(d.n_segments for d in documents)
    positions = np.empty(total, dtype=np.int64)
    node_ids = np.empty(total, dtype=np.int64)
    offs = {t: vocab.global_offset(t) for t in BasisType}
    k = 0
    for i, doc in enumerate(documents):
        for pos, basis in doc.segments:
            positions[k] = pos
            node_ids[k] = offs[basis.btype] + basis.id
            k += 1
        offsets[i + 1] = k
    return FlatSegments(positions, node_ids, offsets)


def build_corpus(
    records: Iterable[tuple[str, Optional[datetime.date], list[RawSegment]]],
    min_df: int = 5,
) -> Corpus:
    """Assemble a Corpus from (doc_id, date, raw segments) records.

    Bases occurring in fewer than ``min_df`` distinct documents are dropped
    from the vocabulary; segments referencing them are removed while the
    surviving segments keep their original positions.
    """
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")
    records = list(records)
    seen_ids: set[str] = set()
    df: dict[tuple[BasisType, str], int] = {}
    for doc_id, _, segs in records:
        if doc_id in seen_ids:
            raise DuplicateDocumentError(f"duplicate doc_id {doc_id!r}")
        seen_ids.add(doc_id)
        for key in {(btype, surface) for _, btype, surface in segs}:
            df[key] = df.get(key, 0) + 1

    vocab = Vocabulary()
    documents: list[Document] = []
    for doc_id, date, segs in records:
        kept: list[tuple[int, Basis]] = []
        for pos, btype, surface in segs:
            if df[(btype, surface)] >= min_df:
                kept.append((pos, vocab.add(btype, surface)))
        documents.append(Document(doc_id, date, kept))

    doc_frequency = {
        t: np.array([df[(t, s)] for s in vocab.surfaces(t)], dtype=np.int64)
        for t in BasisType
    }
    return Corpus(documents, vocab, doc_frequency, _flatten(documents, vocab))


def load_corpus(path, min_df: int = 5) -> Corpus:
    """Load a JSON-lines corpus file, applying the document-frequency floor."""

    def records() -> Iterator[tuple[str, Optional[datetime.date], list[RawSegment]]]:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if line.strip():
                    yield _parse_line(line_no, line)

    return build_corpus(records(), min_df=min_df)


def save_corpus(corpus: Corpus, path) -> None:
    """Write a corpus back to the JSON-lines format (round-trips exactly)."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            obj = {
                "doc_id": doc.doc_id,
                "publish_date": doc.publish_date.isoformat() if doc.publish_date else None,
                "segments": [
                    {"pos": pos, "type": basis.btype.label, "surface": basis.surface}
                    for pos, basis in doc.segments
                ],
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def vocabulary_stats(corpus: Corpus) -> VocabStats:
    """Per-type vocabulary sizes plus the document count."""
    return VocabStats(
        counts={t: corpus.vocabulary.size(t) for t in BasisType},
        n_documents=corpus.n_documents,
    )
