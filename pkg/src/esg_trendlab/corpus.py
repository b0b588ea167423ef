"""Corpus ingestion: manifest loading, text normalization and topic counting.

The entry point for analysis is a CSV manifest naming one plain-text report
per (company, year). Text is normalized through a fixed six-step procedure
(acronym expansion, URL removal, lowercasing, non-alphabetic stripping,
whitespace split, short-token drop) and topic occurrences are counted by
matching lexicon phrases as contiguous token n-grams.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadEnum,
    BadLexicon,
    DuplicateCompanyYear,
    MalformedRow,
    MissingFile,
)

SERVICE_AREAS = ("hardware", "software", "service")
DIMENSIONS = ("E", "S", "G")

MANIFEST_COLUMNS = (
    "company_id",
    "display_name",
    "service_area",
    "country",
    "industry",
    "year",
    "path",
)

# Tokens are ASCII lowercase words; anything else is stripped during
# normalization, so phrases must obey the same alphabet.
_TOKEN_RE = re.compile(r"[a-z]+\Z")
_URL_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9+.\-]*://|www\.)\S*")
_NON_ALPHA_RE = re.compile(r"[^a-z]+")


@dataclass(frozen=True)
class CompanyMeta:
    company_id: str
    display_name: str
    service_area: str
    country: str
    industry: str


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: str
    company_id: str
    year: int
    raw_text: str


@dataclass(frozen=True)
class TokenizedDoc:
    doc_id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class TopicEntry:
    topic_id: str
    label: str
    dimension: str  # one of E, S, G
    phrases: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class TopicLexicon:
    topics: tuple[TopicEntry, ...]

    def __post_init__(self):
        seen = set()
        for t in self.topics:
            if t.topic_id in seen:
                raise BadLexicon(f"duplicate topic_id {t.topic_id!r}")
            seen.add(t.topic_id)
            if t.dimension not in DIMENSIONS:
                raise BadLexicon(f"topic {t.topic_id!r} has bad dimension {t.dimension!r}")
            if not t.phrases:
                raise BadLexicon(f"topic {t.topic_id!r} has no phrases")
            for phrase in t.phrases:
                if not 1 <= len(phrase) <= 4:
                    raise BadLexicon(f"topic {t.topic_id!r}: phrases must be 1-4 tokens")
                for tok in phrase:
                    if len(tok) < 3 or not _TOKEN_RE.match(tok):
                        raise BadLexicon(
                            f"topic {t.topic_id!r}: phrase token {tok!r} must be "
                            "lowercase alphabetic, length >= 3"
                        )

    @property
    def topic_ids(self) -> tuple[str, ...]:
        return tuple(t.topic_id for t in self.topics)

    def dimension_of(self, topic_id: str) -> str:
        for t in self.topics:
            if t.topic_id == topic_id:
                return t.dimension
        raise KeyError(topic_id)


@dataclass
class TopicCountMatrix:
    """Dense per-document topic occurrence counts plus document token totals.

    Rows follow ``row_ids`` (document or company keys, caller's choice) and
    columns follow ``topic_ids`` in sorted order. ``year`` is set when the
    matrix covers a single reporting year.
    """

    row_ids: tuple[str, ...]
    topic_ids: tuple[str, ...]
    counts: np.ndarray  # shape (n_rows, n_topics), dtype int64
    doc_token_counts: np.ndarray  # shape (n_rows,), dtype int64
    year: int | None = field(default=None)

    def __post_init__(self):
        if self.counts.shape != (len(self.row_ids), len(self.topic_ids)):
            raise ValueError("counts shape does not match keys")
        if (self.counts < 0).any():
            raise ValueError("negative topic count")
        if self.counts.size and (self.counts.max(axis=1) > self.doc_token_counts).any():
            raise ValueError("topic count exceeds document token count")


def load_manifest(manifest_path: str | Path) -> tuple[list[CompanyMeta], list[DocumentRecord]]:
    """Load a report manifest and eagerly read every referenced text file.

    The manifest is UTF-8 CSV with the header
    ``company_id,display_name,service_area,country,industry,year,path``;
    ``path`` is resolved relative to the manifest's directory. Repeated rows
    for one company must carry identical metadata. Returns companies sorted
    by company_id and records sorted by (company_id, year).

    Raises MissingFile, DuplicateCompanyYear, BadEnum or MalformedRow.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise MissingFile(str(manifest_path))
    base = manifest_path.parent

    companies: dict[str, CompanyMeta] = {}
    records: dict[tuple[str, int], DocumentRecord] = {}
    with open(manifest_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != MANIFEST_COLUMNS:
            raise MalformedRow(1, f"header must be {','.join(MANIFEST_COLUMNS)}")
        for row in reader:
            line = reader.line_num
            if any(row.get(col) in (None, "") for col in MANIFEST_COLUMNS):
                raise MalformedRow(line, "missing field")
            company_id = row["company_id"]
            if row["service_area"] not in SERVICE_AREAS:
                raise BadEnum("service_area", row["service_area"], SERVICE_AREAS)
            try:
                year = int(row["year"])
            except ValueError:
                raise MalformedRow(line, f"year {row['year']!r} is not an integer")
            meta = CompanyMeta(
                company_id=company_id,
                display_name=row["display_name"],
                service_area=row["service_area"],
                country=row["country"],
                industry=row["industry"],
            )
            if company_id in companies:
                if companies[company_id] != meta:
                    raise MalformedRow(line, f"inconsistent metadata for {company_id!r}")
            else:
                companies[company_id] = meta
            if (company_id, year) in records:
                raise DuplicateCompanyYear(company_id, year)
            text_path = base / row["path"]
            if not text_path.is_file():
                raise MissingFile(str(text_path))
            records[(company_id, year)] = DocumentRecord(
                doc_id=f"{company_id}-{year}",
                company_id=company_id,
                year=year,
                raw_text=text_path.read_text(encoding="utf-8"),
            )

    company_list = sorted(companies.values(), key=lambda c: c.company_id)
    record_list = sorted(records.values(), key=lambda r: (r.company_id, r.year))
    return company_list, record_list


def load_lexicon(path: str | Path) -> TopicLexicon:
    """Load a topic lexicon from its JSON list-of-topics format."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    raw = json.loads(path.read_text(encoding="utf-8"))
    topics = tuple(
        TopicEntry(
            topic_id=entry["topic_id"],
            label=entry["label"],
            dimension=entry["dimension"],
            phrases=tuple(tuple(p) for p in entry["phrases"]),
        )
        for entry in raw
    )
    return TopicLexicon(topics=topics)


def load_acronyms(path: str | Path) -> list[tuple[str, str]]:
    """Load an acronym map (JSON object, insertion order kept as priority)."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    raw = json.loads(path.read_text(encoding="utf-8"))
    return [(k, v) for k, v in raw.items()]


def _expand_acronyms(text: str, acronyms: Sequence[tuple[str, str]]) -> str:
    """Replace whole-word, case-sensitive acronym occurrences.

    Earlier entries claim their spans first, so on overlapping candidates the
    first-listed acronym wins. Expansions are not re-scanned.
    """
    if not acronyms:
        return text
    claimed: list[tuple[int, int, str]] = []  # (start, end, expansion)

    def overlaps(start: int, end: int) -> bool:
        return any(s < end and start < e for s, e, _ in claimed)

    for key, expansion in acronyms:
        if not key:
            continue
        pattern = re.compile(
            r"(?<![A-Za-z0-9])" + re.escape(key) + r"(?![A-Za-z0-9])"
        )
        for m in pattern.finditer(text):
            if not overlaps(m.start(), m.end()):
                claimed.append((m.start(), m.end(), expansion))
    if not claimed:
        return text
    claimed.sort()
    out: list[str] = []
    cursor = 0
    for start, end, expansion in claimed:
        out.append(text[cursor:start])
        out.append(expansion)
        cursor = end
    out.append(text[cursor:])
    return "".join(out)


def normalize_text(
    raw_text: str,
    acronyms: Sequence[tuple[str, str]] = (),
    min_token_len: int = 3,
    stopwords: frozenset[str] = frozenset(),
) -> tuple[str, ...]:
    """Normalize raw report text into lowercase word tokens.

    Processing order is fixed:

    1. expand acronyms (whole-word, case-sensitive, first-listed wins on
       overlapping matches);
    2. remove URLs (maximal ``scheme://...`` or ``www....`` substrings);
    3. lowercase;
    4. replace every non-alphabetic character (anything outside a-z) with a
       space;
    5. split on whitespace;
    6. drop tokens shorter than ``min_token_len``.

    ``stopwords`` is an optional post-filter applied after step 6; the
    default pipeline passes none.
    """
    if min_token_len < 1:
        raise ValueError("min_token_len must be >= 1")
    text = _expand_acronyms(raw_text, acronyms)
    text = _URL_RE.sub(" ", text)
    text = text.lower()
    text = _NON_ALPHA_RE.sub(" ", text)
    tokens = tuple(t for t in text.split() if len(t) >= min_token_len)
    if stopwords:
        tokens = tuple(t for t in tokens if t not in stopwords)
    return tokens


def tokenize_documents(
    records: Iterable[DocumentRecord],
    acronyms: Sequence[tuple[str, str]] = (),
    min_token_len: int = 3,
    stopwords: frozenset[str] = frozenset(),
) -> list[TokenizedDoc]:
    """Normalize every record; output order follows the input order."""
    return [
        TokenizedDoc(doc_id=r.doc_id, tokens=normalize_text(r.raw_text, acronyms, min_token_len, stopwords))
        for r in records
    ]


def count_topics(doc: TokenizedDoc, lexicon: TopicLexicon) -> dict[str, int]:
    """Count topic occurrences in one tokenized document.

    A topic's count is the number of non-overlapping, left-to-right phrase
    matches; positions consumed by one phrase of a topic are unavailable to
    that topic's other phrases (first-listed phrase wins at a position), but
    distinct topics may match the same positions independently.
    """
    counts: dict[str, int] = {}
    tokens = doc.tokens
    n = len(tokens)
    for topic in lexicon.topics:
        c = 0
        pos = 0
        while pos < n:
            matched = 0
            for phrase in topic.phrases:
                plen = len(phrase)
                if pos + plen <= n and tokens[pos : pos + plen] == phrase:
                    matched = plen
                    break
            if matched:
                c += 1
                pos += matched
            else:
                pos += 1
        counts[topic.topic_id] = c
    return counts


def build_count_matrix(
    docs: Sequence[TokenizedDoc],
    lexicon: TopicLexicon,
    year: int | None = None,
    row_ids: Sequence[str] | None = None,
) -> TopicCountMatrix:
    """Assemble a dense (doc x topic) count matrix with explicit zeros.

    ``row_ids`` relabels rows (e.g. company ids for a single-year matrix);
    by default rows carry the doc ids. Topics are sorted by topic_id.
    """
    if row_ids is None:
        row_ids = [d.doc_id for d in docs]
    topic_ids = tuple(sorted(lexicon.topic_ids))
    col_of = {t: j for j, t in enumerate(topic_ids)}
    counts = np.zeros((len(docs), len(topic_ids)), dtype=np.int64)
    lengths = np.zeros(len(docs), dtype=np.int64)
    for i, doc in enumerate(docs):
        lengths[i] = len(doc.tokens)
        for topic_id, c in count_topics(doc, lexicon).items():
            counts[i, col_of[topic_id]] = c
    return TopicCountMatrix(
        row_ids=tuple(row_ids),
        topic_ids=topic_ids,
        counts=counts,
        doc_token_counts=lengths,
        year=year,
    )


def write_token_cache(docs: Sequence[TokenizedDoc], records: Sequence[DocumentRecord], path: str | Path) -> None:
    """Write the tokenized corpus as JSON lines with a stable field order."""
    by_id = {r.doc_id: r for r in records}
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            rec = by_id[doc.doc_id]
            fh.write(
                json.dumps(
                    {
                        "doc_id": doc.doc_id,
                        "company_id": rec.company_id,
                        "year": rec.year,
                        "tokens": list(doc.tokens),
                    },
                    ensure_ascii=True,
                )
            )
            fh.write("\n")


def read_token_cache(path: str | Path) -> list[tuple[TokenizedDoc, str, int]]:
    """Read the JSONL token cache: (doc, company_id, year) per line."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            out.append(
                (
                    TokenizedDoc(doc_id=obj["doc_id"], tokens=tuple(obj["tokens"])),
                    obj["company_id"],
                    int(obj["year"]),
                )
            )
    return out
