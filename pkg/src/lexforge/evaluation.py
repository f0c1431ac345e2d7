"""BLEU scoring of generated definitions and definition-corpus statistics."""

from __future__ import annotations

import math
import string
from collections import Counter
from dataclasses import dataclass, field

from .corpus import Document
from .definitions import DefinitionElement
from .errors import EmptyReference

_STRIP_CHARS = string.punctuation + "‘’“”…–—"


def tokenize(text: str) -> list[str]:
    """Lowercase whitespace tokens with leading/trailing punctuation stripped."""
    tokens = []
    for raw in text.lower().split():
        token = raw.strip(_STRIP_CHARS)
        if token:
            tokens.append(token)
    return tokens


@dataclass
class BleuReport:
    bleu: dict[int, float]
    brevity_penalty: float
    candidate_length: int
    reference_length: int


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: str, reference: str, max_n: int = 4) -> BleuReport:
    """Cumulative BLEU-1..max_n with clipped precisions and brevity penalty.

    Precisions for n >= 2 get add-one smoothing (numerator and denominator)
    when the raw clipped count is zero; BLEU-1 is unsmoothed.
    """
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not ref:
        raise EmptyReference("reference empty after tokenization")

    cand_len, ref_len = len(cand), len(ref)
    if cand_len == 0:
        bp = math.exp(1 - ref_len)
        return BleuReport(
            bleu={n: 0.0 for n in range(1, max_n + 1)},
            brevity_penalty=bp,
            candidate_length=0,
            reference_length=ref_len,
        )

    bp = 1.0 if cand_len >= ref_len else math.exp(1 - ref_len / cand_len)

    precisions: list[float] = []
    for n in range(1, max_n + 1):
        cand_grams = _ngram_counts(cand, n)
        ref_grams = _ngram_counts(ref, n)
        total = sum(cand_grams.values())
        clipped = sum(min(count, ref_grams[gram]) for gram, count in cand_grams.items())
        if n >= 2 and clipped == 0:
            precisions.append((clipped + 1) / (total + 1))
        else:
            precisions.append(clipped / total if total else 0.0)

    scores: dict[int, float] = {}
    for n in range(1, max_n + 1):
        if any(p == 0.0 for p in precisions[:n]):
            scores[n] = 0.0
        else:
            log_mean = sum(math.log(p) for p in precisions[:n]) / n
            scores[n] = bp * math.exp(log_mean)

    return BleuReport(
        bleu=scores, brevity_penalty=bp, candidate_length=cand_len, reference_length=ref_len
    )


@dataclass
class BatchReport:
    bleu: dict[int, float]
    pairs_scored: int
    pairs_skipped: int
    per_pair: list[BleuReport]
    # placeholders for externally computed model-based metrics
    bertscore: dict | None = None
    bleurt: float | None = None


def evaluate_batch(pairs: list[tuple[str, str]], max_n: int = 4) -> BatchReport:
    """Macro-average BLEU over (generated, reference) pairs.

    Pairs with an empty reference are skipped and counted.
    """
    if not pairs:
        raise ValueError("pairs must be non-empty")
    per_pair: list[BleuReport] = []
    skipped = 0
    for generated, reference in pairs:
        try:
            per_pair.append(bleu(generated, reference, max_n=max_n))
        except EmptyReference:
            skipped += 1
    aggregate = {
        n: (sum(r.bleu[n] for r in per_pair) / len(per_pair)) if per_pair else 0.0
        for n in range(1, max_n + 1)
    }
    return BatchReport(
        bleu=aggregate, pairs_scored=len(per_pair), pairs_skipped=skipped, per_pair=per_pair
    )


@dataclass
class CorpusStats:
    documents_total: int
    documents_html: int
    documents_with_definitions: int
    elements_total: int
    terms_total: int
    single_element_terms: int
    multi_element_terms: int
    multi_element_elements: int
    definition_length_mean: float | None
    definition_length_stddev: float | None
    histogram: dict[int, int] = field(default_factory=dict)


HISTOGRAM_BUCKET_WIDTH = 5


def corpus_stats(
    documents: list[Document],
    elements: list[DefinitionElement],
    non_html_documents: int = 0,
) -> CorpusStats:
    """Counts over the document and definition corpora.

    Definition lengths are measured in tokenize() tokens of explanations;
    the histogram buckets widths of 5 words by bucket start.
    """
    from .definitions import locate_definitions_article

    with_defs = sum(1 for d in documents if locate_definitions_article(d) is not None)

    by_term: dict[str, int] = {}
    for el in elements:
        by_term[el.term] = by_term.get(el.term, 0) + 1
    single = sum(1 for c in by_term.values() if c == 1)
    multi_terms = sum(1 for c in by_term.values() if c > 1)
    multi_elements = sum(c for c in by_term.values() if c > 1)

    lengths = [len(tokenize(el.explanation)) for el in elements]
    if lengths:
        mean = sum(lengths) / len(lengths)
        stddev = math.sqrt(sum((x - mean) ** 2 for x in lengths) / len(lengths))
    else:
        mean = stddev = None

    histogram: dict[int, int] = {}
    for length in lengths:
        bucket = (length // HISTOGRAM_BUCKET_WIDTH) * HISTOGRAM_BUCKET_WIDTH
        histogram[bucket] = histogram.get(bucket, 0) + 1

    return CorpusStats(
        documents_total=len(documents) + non_html_documents,
        documents_html=len(documents),
        documents_with_definitions=with_defs,
        elements_total=len(elements),
        terms_total=len(by_term),
        single_element_terms=single,
        multi_element_terms=multi_terms,
        multi_element_elements=multi_elements,
        definition_length_mean=mean,
        definition_length_stddev=stddev,
        histogram=dict(sorted(histogram.items())),
    )
