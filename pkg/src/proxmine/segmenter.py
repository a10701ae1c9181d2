"""Phrase mining and document segmentation.

Mines thematic phrases as frequent contiguous n-grams passing a
co-occurrence significance test, then segments raw token streams into
basis sequences, merging the mined phrases with supplied entity
annotations.

Raw input format (one JSON object per line)::

    {"doc_id": str, "tokens": [str],
     "annotations": [{"start": int, "end": int, "type": str, "surface": str}]}

Annotation spans are token ranges ``[start, end)``, non-overlapping, typed
with one of the non-phrase basis types.  Output documents use the corpus
module's segment positions: the 1-based index of each segment in the
resulting sequence.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .corpus import BasisType, Document, ParseError, RawSegment, SchemaError

MAX_PHRASE_LEN = 6

#: Small English function-word list; configurable per call.
DEFAULT_STOPWORDS = frozenset(
    """a an the and or but if then else when while of in on at by for with to
    from as is are was were be been being am do does did done doing have has
    had having it its this that these those he she they them his her their
    we you i me my your our us not no nor so than too very can will just
    there here out up down over under again once about into through during
    before after above below between both each few more most other some such
    only own same s t don should now""".split()
)


@dataclass
class RawDocument:
    """Tokenized document with pre-annotated entity spans."""

    doc_id: str
    tokens: list[str]
    annotations: list[tuple[int, int, BasisType, str]]
    publish_date: Optional[str] = None

    def __post_init__(self) -> None:
        last_end = 0
        n = len(self.tokens)
        for start, end, btype, _ in sorted(self.annotations):
            if btype == BasisType.PHRASE:
                raise ValueError("annotations must use non-phrase basis types")
            if start < last_end or not (0 <= start < end <= n):
                raise ValueError(
                    f"annotation span [{start}, {end}) overlaps or exceeds bounds in {self.doc_id!r}"
                )
            last_end = end
        self.annotations = sorted(self.annotations)


@dataclass(frozen=True)
class PhraseCandidate:
    """A mined contiguous n-gram with its corpus count and merge score."""

    tokens: tuple[str, ...]
    frequency: int
    significance: float

    @property
    def surface(self) -> str:
        return " ".join(self.tokens)


def _free_spans(doc: RawDocument) -> list[tuple[int, int]]:
    """Token ranges lying outside annotation spans."""
    spans = []
    cursor = 0
    for start, end, _, _ in doc.annotations:
        if start > cursor:
            spans.append((cursor, start))
        cursor = end
    if cursor < len(doc.tokens):
        spans.append((cursor, len(doc.tokens)))
    return spans


def merge_significance(count_ab: int, count_a: int, count_b: int, n_tokens: int) -> float:
    """Score for merging adjacent units a, b into the n-gram ab.

    Positive when ab occurs more often than independence of a and b would
    predict; near zero for independently drawn tokens.
    """
    if count_ab <= 0:
        return float("-inf")
    expected = count_a * count_b / max(n_tokens, 1)
    return (count_ab - expected) / math.sqrt(count_ab)


def mine_phrases(
    docs: Sequence[RawDocument],
    min_support: int,
    sig_threshold: float,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
) -> set[PhraseCandidate]:
    """Mine contiguous n-grams (n <= 6) by agglomerative significant merging.

    A unigram qualifies when its count reaches ``min_support``; an n-gram
    qualifies when its count reaches ``min_support`` and it splits into two
    adjacent qualified sub-units whose merge significance reaches
    ``sig_threshold``.  Qualified unigrams are retained as single-word
    phrases only when they are not stopwords.
    """
    if min_support < 1:
        raise ValueError(f"min_support must be >= 1, got {min_support}")

    counts: Counter[tuple[str, ...]] = Counter()
    n_tokens = 0
    for doc in docs:
        for lo, hi in _free_spans(doc):
            n_tokens += hi - lo
            for n in range(1, min(MAX_PHRASE_LEN, hi - lo) + 1):
                for i in range(lo, hi - n + 1):
                    counts[tuple(doc.tokens[i : i + n])] += 1

    qualified: dict[tuple[str, ...], float] = {}
    for gram, cnt in counts.items():
        if len(gram) == 1 and cnt >= min_support:
            qualified[gram] = 0.0
    for n in range(2, MAX_PHRASE_LEN + 1):
        for gram, cnt in counts.items():
            if len(gram) != n or cnt < min_support:
                continue
            best = float("-inf")
            for k in range(1, n):
                a, b = gram[:k], gram[k:]
                if a in qualified and b in qualified:
                    best = max(best, merge_significance(cnt, counts[a], counts[b], n_tokens))
            if best >= sig_threshold:
                qualified[gram] = best

    return {
        PhraseCandidate(gram, counts[gram], sig)
        for gram, sig in qualified.items()
        if len(gram) > 1 or gram[0] not in stopwords
    }


def segment_document(
    doc: RawDocument,
    phrases: Iterable[PhraseCandidate],
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
) -> Document:
    """Greedy left-to-right longest-match segmentation into bases.

    Annotation spans become typed attribute bases.  Token runs between
    annotations are matched against the mined phrase set, longest match
    first; unmatched tokens fall back to single-word phrases unless they
    are stopwords, which are dropped.  Positions are 1-based segment
    indices.  The returned document's bases are unbound (vocabulary ids are
    assigned later by corpus construction).
    """
    phrase_set = {p.tokens for p in phrases}
    segments: list[RawSegment] = []
    ann = {start: (end, btype, surface) for start, end, btype, surface in doc.annotations}
    i = 0
    n = len(doc.tokens)
    next_ann_starts = sorted(ann)

    def next_annotation_at_or_after(i: int) -> int:
        for s in next_ann_starts:
            if s >= i:
                return s
        return n

    while i < n:
        if i in ann:
            end, btype, surface = ann[i]
            segments.append((len(segments) + 1, btype, surface))
            i = end
            continue
        limit = min(next_annotation_at_or_after(i), i + MAX_PHRASE_LEN, n)
        matched = 0
        for j in range(limit, i + 1, -1):
            if tuple(doc.tokens[i:j]) in phrase_set:
                matched = j - i
                break
        if matched:
            surface = " ".join(doc.tokens[i : i + matched])
            segments.append((len(segments) + 1, BasisType.PHRASE, surface))
            i += matched
        else:
            tok = doc.tokens[i]
            if tok not in stopwords:
                segments.append((len(segments) + 1, BasisType.PHRASE, tok))
            i += 1

    from .corpus import Basis  # local import to avoid cycle at module load

    date = None
    if doc.publish_date:
        import datetime

        date = datetime.date.fromisoformat(doc.publish_date)
    return Document(
        doc.doc_id,
        date,
        [(pos, Basis(-1, btype, surface)) for pos, btype, surface in segments],
    )


def load_raw_documents(path) -> list[RawDocument]:
    """Read the raw JSON-lines token format."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_no, f"invalid JSON ({exc.msg})") from None
            try:
                doc_id, tokens = obj["doc_id"], obj["tokens"]
                raw_anns = obj.get("annotations", [])
            except KeyError as exc:
                raise ParseError(line_no, f"missing required key {exc.args[0]!r}") from None
            anns = []
            for a in raw_anns:
                btype = BasisType.from_label(a["type"])
                if btype == BasisType.PHRASE:
                    raise SchemaError(f"line {line_no}: annotations may not use type 'phrase'")
                anns.append((a["start"], a["end"], btype, a["surface"]))
            try:
                docs.append(RawDocument(doc_id, tokens, anns, obj.get("publish_date")))
            except ValueError as exc:
                raise ParseError(line_no, str(exc)) from None
    return docs


def to_records(documents: Sequence[Document]):
    """Convert segmented documents to corpus-builder records."""
    return [
        (d.doc_id, d.publish_date, [(pos, b.btype, b.surface) for pos, b in d.segments])
        for d in documents
    ]
