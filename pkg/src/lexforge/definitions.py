"""Definition extraction and cross-document citation resolution.

Definitions articles lay points down as "'term' means ..." (static) or
"'term' means ... as defined in [citation]" (dynamic).  Several quoted
aliases may be defined together, joined by "or"; they share one
explanation and one aliases group.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .corpus import CelexId, Document, Section, SectionKind
from .errors import SchemaViolation, StorageFailure, UnsupportedInstrument

DYNAMIC_MARKER = "as defined in"


class DefinitionKind(str, Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class SourceRef:
    celex: str
    article_heading: str
    point_label: str | None


@dataclass
class DefinitionElement:
    id: str
    term: str
    explanation: str
    references: list[str]
    kind: DefinitionKind
    source: SourceRef
    aliases_group: str
    # populated by retrieval.lookup_definitions for dynamic elements
    resolved_targets: list["DefinitionElement"] = field(default_factory=list, compare=False)


class Instrument(str, Enum):
    DIRECTIVE = "Directive"
    REGULATION = "Regulation"
    DECISION = "Decision"


_INSTRUMENT_TO_LETTER = {
    Instrument.DIRECTIVE: "L",
    Instrument.REGULATION: "R",
    Instrument.DECISION: "D",
}


@dataclass(frozen=True)
class CitationExpr:
    """A cross-document reference like "point (31) of Article 2 of Directive (EU) 2019/944"."""

    point: int | None
    article: int
    instrument: Instrument
    union_label: str
    year: int
    serial: int

    def __post_init__(self):
        if self.year <= 0 or self.serial <= 0 or self.article < 1:
            raise ValueError("year, serial and article must be positive")

    def format(self) -> str:
        prefix = f"point ({self.point}) of " if self.point is not None else ""
        return (
            f"{prefix}Article {self.article} of {self.instrument.value} "
            f"({self.union_label}) {self.year}/{self.serial}"
        )


class DanglingReason(str, Enum):
    MISSING_DOCUMENT = "MissingDocument"
    MISSING_ARTICLE = "MissingArticle"
    MISSING_POINT = "MissingPoint"
    TERM_MISMATCH = "TermMismatch"


@dataclass
class ResolutionReport:
    resolved: int = 0
    dangling: list[tuple[str, CitationExpr | None, DanglingReason]] = field(default_factory=list)


def locate_definitions_article(doc: Document) -> Section | None:
    """First article whose heading contains 'definitions', case-insensitively."""
    for section in doc.sections:
        if section.kind is SectionKind.ARTICLE and section.heading:
            if "definitions" in section.heading.lower():
                return section
    return None


# One definition point: optional "(n)" or "n." label, quoted aliases joined
# by "or", the literal "means", then the explanation.  Quotes may be
# typographic or ASCII; inner double-quoted placeholders stay inside terms.
_QUOTED = r"(?:‘[^’]*’|'[^']*')"
_POINT_RE = re.compile(
    rf"^\s*(?:\((?P<plabel>\d+)\)|(?P<plabel2>\d+)\.)?\s*"
    rf"(?P<terms>{_QUOTED}(?:\s+or\s+{_QUOTED})*)\s+means\s+(?P<expl>.+?)\s*$",
    re.DOTALL,
)
_QUOTED_RE = re.compile(_QUOTED)


_QUOTE_PAIRS = {("'", "'"), ("‘", "’"), ('"', '"')}


def normalize_term(raw: str) -> str:
    """Lowercase, trim, strip surrounding quotes, collapse internal whitespace.

    Only a matched surrounding pair is stripped, so inner double-quoted
    placeholders survive intact.
    """
    term = raw.strip()
    while len(term) >= 2 and (term[0], term[-1]) in _QUOTE_PAIRS:
        term = term[1:-1].strip()
    return re.sub(r"\s+", " ", term).lower()


def _element_id(celex: str, heading: str, point_label: str | None, term: str) -> str:
    key = f"{celex}|{heading}|{point_label or ''}|{term}"
    return hashlib.sha1(key.encode("utf-8")).hexdigest()[:16]


def classify_definition(explanation: str) -> DefinitionKind:
    if not explanation:
        raise ValueError("explanation must be non-empty")
    if DYNAMIC_MARKER in explanation.lower():
        return DefinitionKind.DYNAMIC
    return DefinitionKind.STATIC


def extract_definitions(
    section: Section, celex: CelexId, warnings: list[str] | None = None
) -> list[DefinitionElement]:
    """Extract one element per quoted alias from a Definitions article.

    Paragraphs that do not match the point pattern are skipped; a note is
    appended to `warnings` when a list is supplied.
    """
    heading = section.heading or ""
    elements: list[DefinitionElement] = []
    for _, text in section.paragraphs:
        stripped = text.strip()
        if not stripped:
            continue
        m = _POINT_RE.match(stripped)
        if not m:
            if warnings is not None and len(stripped.split()) > 2:
                warnings.append(f"{celex.raw} {heading}: unmatched paragraph: {stripped[:80]}")
            continue
        point_label = m.group("plabel") or m.group("plabel2")
        terms = [normalize_term(q) for q in _QUOTED_RE.findall(m.group("terms"))]
        explanation = "means " + m.group("expl").rstrip(";. ").strip()
        kind = classify_definition(explanation)
        group_id = _element_id(celex.raw, heading, point_label, "|".join(terms))
        source = SourceRef(celex=celex.raw, article_heading=heading, point_label=point_label)
        for term in terms:
            elements.append(
                DefinitionElement(
                    id=_element_id(celex.raw, heading, point_label, term),
                    term=term,
                    explanation=explanation,
                    references=[],
                    kind=kind,
                    source=source,
                    aliases_group=group_id,
                )
            )
    return elements


_CITE_RE = re.compile(
    r"(?:point\s+\((?P<point>\d+)\)\s+of\s+)?"
    r"Article\s+(?P<article>\d+)\s+of\s+"
    r"(?P<instrument>Directive|Regulation|Decision)\s+"
    r"\((?P<label>[A-Z]+)\)\s+(?P<year>\d{4})/(?P<serial>\d+)",
    re.IGNORECASE,
)


def parse_citation(text: str) -> list[CitationExpr]:
    """Every maximal citation-grammar match in textual order."""
    cites = []
    for m in _CITE_RE.finditer(text):
        cites.append(
            CitationExpr(
                point=int(m.group("point")) if m.group("point") else None,
                article=int(m.group("article")),
                instrument=Instrument(m.group("instrument").capitalize()),
                union_label=m.group("label").upper(),
                year=int(m.group("year")),
                serial=int(m.group("serial")),
            )
        )
    return cites


def citation_to_celex(cite: CitationExpr) -> CelexId:
    letter = _INSTRUMENT_TO_LETTER.get(cite.instrument)
    if letter is None:
        raise UnsupportedInstrument(str(cite.instrument))
    return CelexId.parse(f"3{cite.year:04d}{letter}{cite.serial:04d}")


_ARTICLE_NUM_RE = re.compile(r"Article\s+(\d+)", re.IGNORECASE)


def _article_number(heading: str) -> int | None:
    m = _ARTICLE_NUM_RE.search(heading)
    return int(m.group(1)) if m else None


def resolve_citations(
    elements: list[DefinitionElement],
) -> tuple[list[DefinitionElement], ResolutionReport]:
    """Populate references of dynamic elements from the element store.

    Only direct targets are stored.  Failures never raise; each unresolved
    dynamic element contributes one dangling entry with a reason.
    """
    by_celex: dict[str, list[DefinitionElement]] = {}
    for el in elements:
        by_celex.setdefault(el.source.celex, []).append(el)

    report = ResolutionReport()
    for el in elements:
        if el.kind is not DefinitionKind.DYNAMIC:
            continue
        cites = parse_citation(el.explanation)
        if not cites:
            report.dangling.append((el.id, None, DanglingReason.TERM_MISMATCH))
            continue
        cite = cites[0]
        target_celex = citation_to_celex(cite).raw
        candidates = by_celex.get(target_celex)
        if not candidates:
            report.dangling.append((el.id, cite, DanglingReason.MISSING_DOCUMENT))
            continue
        in_article = [
            c for c in candidates if _article_number(c.source.article_heading) == cite.article
        ]
        if not in_article:
            report.dangling.append((el.id, cite, DanglingReason.MISSING_ARTICLE))
            continue
        if cite.point is not None:
            targets = [c for c in in_article if c.source.point_label == str(cite.point)]
            if not targets:
                report.dangling.append((el.id, cite, DanglingReason.MISSING_POINT))
                continue
        else:
            targets = [c for c in in_article if c.term == el.term]
            if not targets:
                report.dangling.append((el.id, cite, DanglingReason.TERM_MISMATCH))
                continue
        el.references = [t.id for t in targets]
        report.resolved += 1
    return elements, report


# --- JSONL persistence ------------------------------------------------------


def _point_sort_key(label: str | None):
    if label is None:
        return (1, 0)
    return (0, int(label)) if label.isdigit() else (0, 0)


def element_to_record(el: DefinitionElement) -> dict:
    return {
        "id": el.id,
        "term": el.term,
        "explanation": el.explanation,
        "references": el.references,
        "kind": el.kind.value,
        "celex": el.source.celex,
        "article_heading": el.source.article_heading,
        "point_label": el.source.point_label,
        "aliases_group": el.aliases_group,
    }


def element_from_record(record: dict, line: int | None = None) -> DefinitionElement:
    try:
        return DefinitionElement(
            id=record["id"],
            term=record["term"],
            explanation=record["explanation"],
            references=list(record.get("references", [])),
            kind=DefinitionKind(record["kind"]),
            source=SourceRef(
                celex=record["celex"],
                article_heading=record["article_heading"],
                point_label=record.get("point_label"),
            ),
            aliases_group=record["aliases_group"],
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaViolation(str(exc), line=line) from exc


def save_elements(elements: list[DefinitionElement], destination: str | Path) -> int:
    ordered = sorted(
        elements,
        key=lambda e: (
            e.source.celex,
            e.source.article_heading,
            _point_sort_key(e.source.point_label),
            e.term,
        ),
    )
    try:
        with open(destination, "w", encoding="utf-8") as fh:
            for el in ordered:
                fh.write(json.dumps(element_to_record(el), ensure_ascii=False) + "\n")
    except OSError as exc:
        raise StorageFailure(str(exc)) from exc
    return len(ordered)


def load_elements(source: str | Path) -> list[DefinitionElement]:
    try:
        with open(source, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise StorageFailure(str(exc)) from exc
    elements = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"invalid JSON: {exc}", line=lineno) from exc
        elements.append(element_from_record(record, line=lineno))
    return elements
