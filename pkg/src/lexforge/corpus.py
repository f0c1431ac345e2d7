"""Document model for EU-style legal acts.

Acts are consumed in a canonical JSON format (one act per file or JSONL
record) with explicit zone markers; a best-effort HTML normalizer turns
fetched EUR-Lex pages into that format.  Parsed documents are immutable
and persist to a JSONL corpus store.
"""

from __future__ import annotations

import json
import re
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

import httpx

from .errors import (
    DuplicateCelex,
    EmptyDocument,
    MalformedAct,
    NetworkFailure,
    NonHtmlFormat,
    NotFound,
    SchemaViolation,
    StorageFailure,
)

_CELEX_RE = re.compile(r"^(\d)(\d{4})([A-Z])(\d{4})$")

_INSTRUMENT_LETTERS = {"L": "Directive", "R": "Regulation", "D": "Decision"}


@dataclass(frozen=True)
class CelexId:
    """EUR-Lex document identifier, e.g. 32019L0944."""

    sector: int
    year: int
    instrument_letter: str
    serial: str

    @property
    def raw(self) -> str:
        return f"{self.sector}{self.year:04d}{self.instrument_letter}{self.serial}"

    @classmethod
    def parse(cls, raw: str) -> "CelexId":
        m = _CELEX_RE.match(raw)
        if not m:
            raise ValueError(f"not a valid Celex id: {raw!r}")
        sector, year, letter, serial = m.groups()
        year_i = int(year)
        if not 1900 <= year_i <= 2100:
            raise ValueError(f"Celex year out of range: {year}")
        return cls(sector=int(sector), year=year_i, instrument_letter=letter, serial=serial)

    def __str__(self) -> str:
        return self.raw


class SectionKind(str, Enum):
    HEADER = "header"
    RECITAL = "recital"
    ARTICLE = "article"
    ATTACHMENT = "attachment"


@dataclass
class Section:
    """One zone of a legal act: header, a recital, an article, or an attachment."""

    position: int
    kind: SectionKind
    heading: str | None
    paragraphs: list[tuple[int, str]]

    def __post_init__(self):
        positions = [p for p, _ in self.paragraphs]
        if positions != list(range(len(positions))):
            raise ValueError("paragraph positions must be 0-based, increasing, gap-free")
        if self.kind is SectionKind.ARTICLE and not self.heading:
            raise ValueError("article sections require a heading")


@dataclass
class Document:
    celex: CelexId
    title: str
    year: int
    eurovoc_descriptors: frozenset[str]
    sections: list[Section]

    def __post_init__(self):
        positions = [s.position for s in self.sections]
        if positions != list(range(len(positions))):
            raise ValueError("section positions must be 0-based, increasing, gap-free")
        if sum(1 for s in self.sections if s.kind is SectionKind.HEADER) > 1:
            raise ValueError("at most one header section allowed")


@dataclass(frozen=True)
class Fragment:
    """A sentence-level unit of a section paragraph, the retrieval granularity."""

    fragment_id: str
    celex: CelexId | None
    section_position: int
    paragraph_position: int
    sentence_position: int
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("fragment text must be non-empty")


def parse_legal_act(
    source_text: str,
    celex: CelexId,
    title: str = "",
    eurovoc: Iterable[str] = (),
    year: int | None = None,
) -> Document:
    """Parse an act in the canonical JSON format into a Document.

    Explicit metadata arguments override fields embedded in the source.
    Raises EmptyDocument for empty input and MalformedAct when no zone
    markers can be recognized.
    """
    if not source_text.strip():
        raise EmptyDocument("empty source text")
    try:
        data = json.loads(source_text)
    except json.JSONDecodeError as exc:
        raise MalformedAct(f"not valid canonical act JSON: {exc}") from exc
    if not isinstance(data, dict) or "zones" not in data:
        raise MalformedAct("no recognizable zone markers ('zones' missing)")
    zones = data["zones"]
    if not isinstance(zones, list) or not zones:
        raise MalformedAct("'zones' must be a non-empty list")

    title = title or data.get("title", "")
    descriptors = frozenset(d.lower() for d in (list(eurovoc) or data.get("eurovoc", [])))
    year = year or data.get("year") or celex.year

    sections: list[Section] = []
    for pos, zone in enumerate(zones):
        try:
            kind = SectionKind(zone["kind"])
        except (KeyError, TypeError, ValueError):
            raise MalformedAct(f"zone {pos}: unknown or missing kind")
        raw_paragraphs = zone.get("paragraphs", [])
        paragraphs = [(i, p) for i, p in enumerate(raw_paragraphs) if isinstance(p, str)]
        try:
            sections.append(
                Section(position=pos, kind=kind, heading=zone.get("heading"), paragraphs=paragraphs)
            )
        except ValueError as exc:
            raise MalformedAct(f"zone {pos}: {exc}") from exc

    return Document(
        celex=celex, title=title, year=int(year), eurovoc_descriptors=descriptors, sections=sections
    )


# Sentence boundary: terminator, whitespace, then uppercase or digit.
# Semicolons and colons never split; neither does anything inside parentheses.
_TERMINATORS = ".?!"


def split_sentences(text: str) -> list[str]:
    """Split text on sentence terminators, never inside parentheses."""
    sentences: list[str] = []
    depth = 0
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        elif ch in _TERMINATORS and depth == 0:
            j = i + 1
            if j < n and text[j].isspace():
                k = j
                while k < n and text[k].isspace():
                    k += 1
                if k < n and (text[k].isupper() or text[k].isdigit()):
                    sentences.append(text[start : i + 1].strip())
                    start = k
                    i = k
                    continue
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def fragment_section(section: Section, celex: CelexId | None = None) -> list[Fragment]:
    """Split a section's paragraphs into sentence fragments, preserving order."""
    fragments: list[Fragment] = []
    prefix = celex.raw if celex else "draft"
    for para_pos, text in section.paragraphs:
        if not text.strip():
            continue
        for sent_pos, sentence in enumerate(split_sentences(text)):
            fragments.append(
                Fragment(
                    fragment_id=f"{prefix}:{section.position}:{para_pos}:{sent_pos}",
                    celex=celex,
                    section_position=section.position,
                    paragraph_position=para_pos,
                    sentence_position=sent_pos,
                    text=sentence,
                )
            )
    return fragments


def document_to_record(doc: Document) -> dict:
    return {
        "celex": doc.celex.raw,
        "title": doc.title,
        "year": doc.year,
        "eurovoc": sorted(doc.eurovoc_descriptors),
        "zones": [
            {
                "position": s.position,
                "kind": s.kind.value,
                "heading": s.heading,
                "paragraphs": [text for _, text in s.paragraphs],
            }
            for s in doc.sections
        ],
    }


def document_from_record(record: dict, line: int | None = None) -> Document:
    for key in ("celex", "title", "zones"):
        if key not in record:
            raise SchemaViolation(f"record missing {key!r}", line=line)
    try:
        celex = CelexId.parse(record["celex"])
    except ValueError as exc:
        raise SchemaViolation(str(exc), line=line) from exc
    try:
        sections = [
            Section(
                position=i,
                kind=SectionKind(z["kind"]),
                heading=z.get("heading"),
                paragraphs=list(enumerate(z.get("paragraphs", []))),
            )
            for i, z in enumerate(record["zones"])
        ]
        return Document(
            celex=celex,
            title=record["title"],
            year=int(record.get("year") or celex.year),
            eurovoc_descriptors=frozenset(d.lower() for d in record.get("eurovoc", [])),
            sections=sections,
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise SchemaViolation(str(exc), line=line) from exc


def save_corpus(documents: list[Document], destination: str | Path) -> int:
    """Write one JSONL record per document; returns the count written."""
    seen: set[str] = set()
    for doc in documents:
        if doc.celex.raw in seen:
            raise DuplicateCelex(doc.celex.raw)
        seen.add(doc.celex.raw)
    try:
        with open(destination, "w", encoding="utf-8") as fh:
            for doc in documents:
                fh.write(json.dumps(document_to_record(doc), ensure_ascii=False) + "\n")
    except OSError as exc:
        raise StorageFailure(str(exc)) from exc
    return len(documents)


def load_corpus(source: str | Path) -> list[Document]:
    """Load documents from a JSONL corpus store, re-validating invariants."""
    documents: list[Document] = []
    try:
        with open(source, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise StorageFailure(str(exc)) from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"invalid JSON: {exc}", line=lineno) from exc
        documents.append(document_from_record(record, line=lineno))
    return documents


# --- EUR-Lex fetching -------------------------------------------------------

DEFAULT_EURLEX_BASE = "https://eur-lex.europa.eu"

_rate_lock = threading.Lock()
_last_request_at = 0.0
_MIN_REQUEST_INTERVAL = 1.0
_MAX_RETRIES = 3


def _rate_limit():
    global _last_request_at
    with _rate_lock:
        wait = _last_request_at + _MIN_REQUEST_INTERVAL - time.monotonic()
        if wait > 0:
            time.sleep(wait)
        _last_request_at = time.monotonic()


def fetch_document(
    celex: CelexId,
    endpoint: str = DEFAULT_EURLEX_BASE,
    client: httpx.Client | None = None,
) -> tuple[str, dict]:
    """Fetch an act's HTML page; returns (html, metadata).

    Polite crawling: at least 1 s between requests, 3 retries with
    exponential backoff on transient failures.
    """
    url = f"{endpoint.rstrip('/')}/legal-content/EN/TXT/"
    params = {"uri": f"CELEX:{celex.raw}"}
    own_client = client is None
    client = client or httpx.Client(timeout=30.0, follow_redirects=True)
    try:
        last_exc: Exception | None = None
        for attempt in range(_MAX_RETRIES):
            _rate_limit()
            try:
                resp = client.get(url, params=params)
            except httpx.HTTPError as exc:
                last_exc = exc
                time.sleep(2**attempt)
                continue
            if resp.status_code == 404:
                raise NotFound(celex.raw)
            if resp.status_code >= 500:
                last_exc = NetworkFailure(f"status {resp.status_code}")
                time.sleep(2**attempt)
                continue
            content_type = resp.headers.get("content-type", "")
            if "html" not in content_type.lower():
                raise NonHtmlFormat(f"{celex.raw}: content-type {content_type!r}")
            html = resp.text
            return html, {"celex": celex.raw, "title": _extract_title(html)}
        raise NetworkFailure(f"{celex.raw}: exhausted retries ({last_exc})")
    finally:
        if own_client:
            client.close()


def _extract_title(html: str) -> str:
    m = re.search(r"<title[^>]*>(.*?)</title>", html, re.IGNORECASE | re.DOTALL)
    return re.sub(r"\s+", " ", m.group(1)).strip() if m else ""


_TAG_RE = re.compile(r"<[^>]+>")
_P_RE = re.compile(r"<p[^>]*>(.*?)</p>", re.IGNORECASE | re.DOTALL)
_ARTICLE_HEADING_RE = re.compile(r"^Article\s+\d+", re.IGNORECASE)
_ANNEX_RE = re.compile(r"^ANNEX", re.IGNORECASE)
_RECITAL_RE = re.compile(r"^\(\d+\)\s")


def html_to_canonical(html: str, celex: CelexId, title: str = "", eurovoc: Iterable[str] = ()) -> dict:
    """Best-effort conversion of a fetched EUR-Lex page to the canonical format.

    Zone heuristics: blocks before the first recital/article form the header;
    "(n) ..." blocks before the first article are recitals; "Article N" starts
    a new article (its heading absorbs the following short block when that
    looks like an article title); "ANNEX..." starts an attachment.
    """
    import html as html_mod

    blocks = []
    for m in _P_RE.finditer(html):
        text = re.sub(r"\s+", " ", html_mod.unescape(_TAG_RE.sub(" ", m.group(1)))).strip()
        if text:
            blocks.append(text)
    if not blocks:
        raise MalformedAct("no paragraph content found in HTML")

    zones: list[dict] = []
    header: dict = {"kind": "header", "heading": None, "paragraphs": []}
    current: dict | None = None
    seen_article = False
    for block in blocks:
        if _ARTICLE_HEADING_RE.match(block) and len(block) < 120:
            current = {"kind": "article", "heading": block, "paragraphs": []}
            zones.append(current)
            seen_article = True
        elif _ANNEX_RE.match(block) and len(block) < 120:
            current = {"kind": "attachment", "heading": block, "paragraphs": []}
            zones.append(current)
        elif not seen_article and _RECITAL_RE.match(block):
            zones.append({"kind": "recital", "heading": None, "paragraphs": [block]})
        elif current is not None:
            current["paragraphs"].append(block)
        else:
            header["paragraphs"].append(block)

    return {
        "celex": celex.raw,
        "title": title,
        "year": celex.year,
        "eurovoc": sorted({d.lower() for d in eurovoc}),
        "zones": [header] + zones,
    }
