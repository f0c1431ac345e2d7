"""Umbrella CLI for the lexforge drafting toolkit."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import corpus as corpus_mod
from . import definitions as defs_mod
from . import evaluation as eval_mod
from . import retrieval as retrieval_mod
from .corpus import CelexId
from .generation import GenParams, HttpGenerator, MockGenerator, generate_definition
from .service import DraftingService, SessionStore, create_app


@click.group()
def main():
    """lexforge: build corpora of legal acts, extract definitions, draft new ones."""


def _load_act_file(path: Path) -> list[corpus_mod.Document]:
    text = path.read_text(encoding="utf-8")
    docs = []
    if path.suffix == ".jsonl":
        for line in text.splitlines():
            if line.strip():
                record = json.loads(line)
                docs.append(corpus_mod.document_from_record(record))
    else:
        record = json.loads(text)
        celex = CelexId.parse(record["celex"])
        docs.append(corpus_mod.parse_legal_act(text, celex))
    return docs


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def ingest(input_path: Path, out_path: Path):
    """Parse canonical act files (dir, JSON file, or JSONL) into a corpus store."""
    paths = sorted(input_path.glob("*.json*")) if input_path.is_dir() else [input_path]
    documents = []
    for path in paths:
        documents.extend(_load_act_file(path))
    count = corpus_mod.save_corpus(documents, out_path)
    click.echo(f"wrote {count} documents to {out_path}")


@main.command()
@click.option("--celex", required=True)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def fetch(celex: str, out_path: Path):
    """Fetch a legal act from EUR-Lex and store its canonical form."""
    celex_id = CelexId.parse(celex)
    base = os.environ.get("LEXFORGE_EURLEX_BASE", corpus_mod.DEFAULT_EURLEX_BASE)
    html, meta = corpus_mod.fetch_document(celex_id, endpoint=base)
    canonical = corpus_mod.html_to_canonical(html, celex_id, title=meta.get("title", ""))
    out_path.write_text(json.dumps(canonical, ensure_ascii=False, indent=2), encoding="utf-8")
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def extract(corpus_path: Path, out_path: Path):
    """Extract definition elements from every Definitions article in the corpus."""
    documents = corpus_mod.load_corpus(corpus_path)
    elements = []
    warnings: list[str] = []
    for doc in documents:
        section = defs_mod.locate_definitions_article(doc)
        if section is not None:
            elements.extend(defs_mod.extract_definitions(section, doc.celex, warnings))
    count = defs_mod.save_elements(elements, out_path)
    for w in warnings:
        click.echo(f"warning: {w}", err=True)
    click.echo(f"wrote {count} elements to {out_path}")


@main.command()
@click.option("--defs", "defs_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--report", "report_path", type=click.Path(path_type=Path))
def resolve(defs_path: Path, out_path: Path, report_path: Path | None):
    """Resolve dynamic-definition citations against the element store."""
    elements = defs_mod.load_elements(defs_path)
    elements, report = defs_mod.resolve_citations(elements)
    defs_mod.save_elements(elements, out_path)
    report_dict = {
        "resolved": report.resolved,
        "dangling": [
            {"element_id": eid, "citation": cite.format() if cite else None, "reason": reason.value}
            for eid, cite, reason in report.dangling
        ],
    }
    if report_path:
        report_path.write_text(json.dumps(report_dict, indent=2), encoding="utf-8")
    click.echo(f"resolved {report.resolved}, dangling {len(report.dangling)}")


@main.command()
@click.option("--defs", "defs_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--term", required=True)
@click.option("--descriptors", default="")
def lookup(defs_path: Path, term: str, descriptors: str):
    """Look a term up in the definition corpus; prints ranked candidates."""
    elements = defs_mod.load_elements(defs_path)
    hits = retrieval_mod.lookup_definitions(term, elements)
    if not hits:
        click.echo("[]")
        return
    draft_descriptors = {d.strip().lower() for d in descriptors.split(",") if d.strip()}
    ranked = retrieval_mod.rank_candidates(hits, draft_descriptors, {})
    click.echo(
        json.dumps(
            [
                {
                    "id": r.element.id,
                    "term": r.element.term,
                    "explanation": r.element.explanation,
                    "celex": r.element.source.celex,
                    "descriptor_overlap": r.descriptor_overlap,
                    "jaccard": float(r.jaccard),
                    "source_year": r.source_year,
                }
                for r in ranked
            ],
            indent=2,
        )
    )


def _draft_sections(draft_path: Path):
    from .service import _sections_from_payload

    record = json.loads(draft_path.read_text(encoding="utf-8"))
    return record, _sections_from_payload(record.get("zones", record.get("sections", [])))


@main.command()
@click.option("--draft", "draft_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--term", required=True)
@click.option("-k", "k", default=retrieval_mod.DEFAULT_K, show_default=True)
def retrieve(draft_path: Path, term: str, k: int):
    """TF-score fragments of the drafted sections for a term."""
    _, sections = _draft_sections(draft_path)
    scored = retrieval_mod.retrieve_fragments(term, sections, k=k)
    click.echo(
        json.dumps(
            [{"fragment_id": s.fragment.fragment_id, "phrase_count": s.phrase_count, "text": s.fragment.text} for s in scored],
            indent=2,
        )
    )


@main.command()
@click.option("--draft", "draft_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--term", required=True)
@click.option("-k", "k", default=retrieval_mod.DEFAULT_K, show_default=True)
@click.option("--mock", is_flag=True, help="Use the bundled deterministic generator.")
def define(draft_path: Path, term: str, k: int, mock: bool):
    """Generate a definition for a term from the draft's own fragments."""
    _, sections = _draft_sections(draft_path)
    fragments = retrieval_mod.retrieve_fragments(term, sections, k=k)
    if not fragments:
        click.echo(f"error: term {term!r} does not occur in the draft", err=True)
        sys.exit(1)
    generator = MockGenerator() if mock else HttpGenerator.from_env()
    result = generate_definition(
        retrieval_mod.normalize_term(term), fragments, GenParams.from_env(), generator
    )
    click.echo(json.dumps(result.to_dict(), indent=2))


@main.command(name="eval")
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", type=click.Path(path_type=Path))
def eval_cmd(pairs_path: Path, out_path: Path | None):
    """BLEU-evaluate generated definitions against ground truth pairs."""
    pairs = []
    for line in pairs_path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            record = json.loads(line)
            pairs.append((record["generated"], record["reference"]))
    report = eval_mod.evaluate_batch(pairs)
    out = {
        "bleu": {f"bleu-{n}": round(v, 6) for n, v in report.bleu.items()},
        "pairs_scored": report.pairs_scored,
        "pairs_skipped": report.pairs_skipped,
    }
    text = json.dumps(out, indent=2)
    if out_path:
        out_path.write_text(text, encoding="utf-8")
    click.echo(text)


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--defs", "defs_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", type=click.Path(path_type=Path))
@click.option("--histogram", "hist_path", type=click.Path(path_type=Path))
def stats(corpus_path: Path, defs_path: Path, out_path: Path | None, hist_path: Path | None):
    """Corpus statistics: document, term, and element counts plus length histogram."""
    documents = corpus_mod.load_corpus(corpus_path)
    elements = defs_mod.load_elements(defs_path)
    report = eval_mod.corpus_stats(documents, elements)
    out = {
        "documents_total": report.documents_total,
        "documents_html": report.documents_html,
        "documents_with_definitions": report.documents_with_definitions,
        "elements_total": report.elements_total,
        "terms_total": report.terms_total,
        "single_element_terms": report.single_element_terms,
        "multi_element_terms": report.multi_element_terms,
        "multi_element_elements": report.multi_element_elements,
        "definition_length_mean": report.definition_length_mean,
        "definition_length_stddev": report.definition_length_stddev,
    }
    text = json.dumps(out, indent=2)
    if out_path:
        out_path.write_text(text, encoding="utf-8")
    if hist_path:
        lines = ["bucket_start,count"] + [f"{b},{c}" for b, c in report.histogram.items()]
        hist_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    click.echo(text)


@main.command()
@click.option("--port", default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--corpus", "corpus_path", type=click.Path(exists=True, path_type=Path))
@click.option("--defs", "defs_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--mock-generator", is_flag=True)
def serve(port: int, host: str, corpus_path: Path | None, defs_path: Path, mock_generator: bool):
    """Run the drafting HTTP service."""
    import uvicorn

    elements = defs_mod.load_elements(defs_path)
    doc_meta: dict[str, tuple[frozenset[str], int]] = {}
    if corpus_path:
        for doc in corpus_mod.load_corpus(corpus_path):
            doc_meta[doc.celex.raw] = (doc.eurovoc_descriptors, doc.year)
    data_dir = Path(os.environ.get("LEXFORGE_DATA_DIR", "."))
    store = SessionStore(data_dir / "sessions.jsonl")
    generator = MockGenerator() if mock_generator else HttpGenerator.from_env()
    service = DraftingService(elements, doc_meta, store, generator, GenParams.from_env())
    uvicorn.run(create_app(service), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
