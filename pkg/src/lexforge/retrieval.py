"""Term lookup with eurovoc-aware ranking and TF-scored fragment retrieval.

Retrieval is strictly lexical: exact-phrase frequency over sentence
fragments of the drafted sections, no embeddings, no fuzzy matching.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .corpus import Fragment, Section, fragment_section
from .definitions import DefinitionElement, DefinitionKind, normalize_term
from .errors import DuplicateFragmentId
from .evaluation import tokenize

__all__ = [
    "normalize_term",
    "InvertedIndex",
    "RankedDefinition",
    "ScoredFragment",
    "build_index",
    "lookup_definitions",
    "rank_candidates",
    "retrieve_fragments",
    "count_phrase",
]

DEFAULT_K = 8


@dataclass(frozen=True)
class RankedDefinition:
    element: DefinitionElement
    descriptor_overlap: int
    jaccard: Fraction
    source_year: int


@dataclass(frozen=True)
class ScoredFragment:
    fragment: Fragment
    phrase_count: int


@dataclass
class InvertedIndex:
    postings: dict[str, list[tuple[str, int]]]
    fragments: dict[str, Fragment]

    def lookup(self, token: str) -> list[tuple[str, int]]:
        return self.postings.get(token, [])


def build_index(fragments: list[Fragment]) -> InvertedIndex:
    """Index every token of every fragment; postings sorted by fragment id."""
    store: dict[str, Fragment] = {}
    counts: dict[str, dict[str, int]] = {}
    for frag in fragments:
        if frag.fragment_id in store:
            raise DuplicateFragmentId(frag.fragment_id)
        store[frag.fragment_id] = frag
        for token in tokenize(frag.text):
            counts.setdefault(token, {}).setdefault(frag.fragment_id, 0)
            counts[token][frag.fragment_id] += 1
    postings = {
        token: sorted(by_frag.items()) for token, by_frag in sorted(counts.items())
    }
    return InvertedIndex(postings=postings, fragments=store)


def lookup_definitions(term: str, store: list[DefinitionElement]) -> list[DefinitionElement]:
    """All elements whose normalized term equals the query term.

    Dynamic elements come back with their resolved static targets attached.
    """
    key = normalize_term(term)
    by_id = {el.id: el for el in store}
    hits = [el for el in store if el.term == key]
    for el in hits:
        if el.kind is DefinitionKind.DYNAMIC and el.references:
            el.resolved_targets = [by_id[ref] for ref in el.references if ref in by_id]
    return hits


def rank_candidates(
    candidates: list[DefinitionElement],
    draft_descriptors: set[str],
    doc_meta: dict[str, tuple[frozenset[str], int]],
) -> list[RankedDefinition]:
    """Order candidates by eurovoc overlap, then Jaccard, recency, celex.

    doc_meta maps a Celex string to (descriptor set, year) for the source
    documents; missing entries fall back to the Celex-encoded year.
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    draft = {d.lower() for d in draft_descriptors}
    ranked: list[RankedDefinition] = []
    for el in candidates:
        descriptors, year = doc_meta.get(
            el.source.celex, (frozenset(), int(el.source.celex[1:5]))
        )
        overlap = len(draft & descriptors)
        union = draft | descriptors
        jaccard = Fraction(overlap, len(union)) if union else Fraction(0)
        ranked.append(
            RankedDefinition(
                element=el, descriptor_overlap=overlap, jaccard=jaccard, source_year=year
            )
        )
    ranked.sort(
        key=lambda r: (
            -r.descriptor_overlap,
            -r.jaccard,
            -r.source_year,
            r.element.source.celex,
            r.element.id,
        )
    )
    return ranked


def count_phrase(phrase: str, text: str) -> int:
    """Non-overlapping, case-insensitive occurrences of the full phrase.

    Matches respect word boundaries, so "zone" never matches inside "ozone".
    """
    normalized = normalize_term(phrase)
    if not normalized:
        return 0
    pattern = r"(?<!\w)" + r"\s+".join(re.escape(w) for w in normalized.split()) + r"(?!\w)"
    return len(re.findall(pattern, text, flags=re.IGNORECASE))


def retrieve_fragments(
    term: str, draft_sections: list[Section], k: int = DEFAULT_K
) -> list[ScoredFragment]:
    """Top-k sentence fragments by exact-phrase frequency, document order on ties."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scored: list[ScoredFragment] = []
    for section in draft_sections:
        if not section.paragraphs:
            continue
        for frag in fragment_section(section):
            count = count_phrase(term, frag.text)
            if count >= 1:
                scored.append(ScoredFragment(fragment=frag, phrase_count=count))
    # stable sort keeps document order within equal counts
    scored.sort(key=lambda s: -s.phrase_count)
    return scored[:k]
