"""Drafting service: session store plus the /v1 HTTP API.

Sessions are file-backed (JSONL) with an in-memory map; corpus and
definition stores are immutable snapshots shared by all requests.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from . import retrieval
from .corpus import Section, SectionKind
from .definitions import DefinitionElement, normalize_term
from .errors import (
    ContextOverflow,
    DuplicateTerm,
    EmptyContext,
    EndpointFailure,
    MissingKey,
    NoJsonFound,
    UnknownSession,
    ValidationFailure,
)
from .generation import (
    GenParams,
    GenerationResult,
    MockGenerator,
    draft_definitions_article,
    generate_definition,
)
from .retrieval import RankedDefinition, rank_candidates, retrieve_fragments


class Provenance(str, Enum):
    CITED = "cited"
    GENERATED = "generated"


class LookupCase(str, Enum):
    NOT_FOUND = "NotFound"
    SINGLE = "Single"
    MULTIPLE = "Multiple"


@dataclass
class LookupOutcome:
    case: LookupCase
    candidates: list[RankedDefinition]


@dataclass
class DraftSession:
    session_id: str
    title: str
    eurovoc_descriptors: frozenset[str]
    sections: list[Section]
    accepted_definitions: list[tuple[str, str, Provenance]] = field(default_factory=list)
    created_at: float = 0.0
    updated_at: float = 0.0


def _sections_from_payload(zones: list[dict]) -> list[Section]:
    try:
        return [
            Section(
                position=i,
                kind=SectionKind(z.get("kind", "article")),
                heading=z.get("heading"),
                paragraphs=list(enumerate(z.get("paragraphs", []))),
            )
            for i, z in enumerate(zones)
        ]
    except (ValueError, TypeError, AttributeError) as exc:
        raise ValidationFailure(str(exc)) from exc


def _session_to_record(s: DraftSession) -> dict:
    return {
        "session_id": s.session_id,
        "title": s.title,
        "eurovoc": sorted(s.eurovoc_descriptors),
        "sections": [
            {"kind": sec.kind.value, "heading": sec.heading, "paragraphs": [t for _, t in sec.paragraphs]}
            for sec in s.sections
        ],
        "accepted_definitions": [
            {"term": t, "text": d, "provenance": p.value} for t, d, p in s.accepted_definitions
        ],
        "created_at": s.created_at,
        "updated_at": s.updated_at,
    }


def _session_from_record(record: dict) -> DraftSession:
    return DraftSession(
        session_id=record["session_id"],
        title=record.get("title", ""),
        eurovoc_descriptors=frozenset(record.get("eurovoc", [])),
        sections=_sections_from_payload(record.get("sections", [])),
        accepted_definitions=[
            (e["term"], e["text"], Provenance(e["provenance"]))
            for e in record.get("accepted_definitions", [])
        ],
        created_at=record.get("created_at", 0.0),
        updated_at=record.get("updated_at", 0.0),
    )


class SessionStore:
    """JSONL-backed session store; every mutation rewrites the file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._sessions: dict[str, DraftSession] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    session = _session_from_record(json.loads(line))
                    self._sessions[session.session_id] = session

    def _flush(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w", encoding="utf-8") as fh:
            for session in self._sessions.values():
                fh.write(json.dumps(_session_to_record(session), ensure_ascii=False) + "\n")

    def create(self, title: str, descriptors: frozenset[str], sections: list[Section]) -> DraftSession:
        now = time.time()
        session = DraftSession(
            session_id=uuid.uuid4().hex,
            title=title,
            eurovoc_descriptors=descriptors,
            sections=sections,
            created_at=now,
            updated_at=now,
        )
        with self._lock:
            self._sessions[session.session_id] = session
            self._flush()
        return session

    def get(self, session_id: str) -> DraftSession:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def update(self, session: DraftSession):
        with self._lock:
            session.updated_at = time.time()
            self._sessions[session.session_id] = session
            self._flush()


class DraftingService:
    """Workflow facade: three-case lookup, generation, acceptance, export."""

    def __init__(
        self,
        elements: list[DefinitionElement],
        doc_meta: dict[str, tuple[frozenset[str], int]],
        store: SessionStore,
        generator=None,
        gen_params: GenParams | None = None,
    ):
        self.elements = elements
        self.doc_meta = doc_meta
        self.store = store
        self.generator = generator or MockGenerator()
        self.gen_params = gen_params or GenParams()

    def create_session(self, title: str, descriptors, sections_payload: list[dict]) -> DraftSession:
        sections = _sections_from_payload(sections_payload)
        return self.store.create(title, frozenset(d.lower() for d in descriptors), sections)

    def lookup_term(self, session_id: str, term: str) -> LookupOutcome:
        session = self.store.get(session_id)
        hits = retrieval.lookup_definitions(term, self.elements)
        if not hits:
            return LookupOutcome(case=LookupCase.NOT_FOUND, candidates=[])
        ranked = rank_candidates(hits, set(session.eurovoc_descriptors), self.doc_meta)
        case = LookupCase.SINGLE if len(ranked) == 1 else LookupCase.MULTIPLE
        return LookupOutcome(case=case, candidates=ranked)

    def generate_for_term(self, session_id: str, term: str, k: int | None = None) -> GenerationResult:
        session = self.store.get(session_id)
        fragments = retrieve_fragments(term, session.sections, k=k or retrieval.DEFAULT_K)
        if not fragments:
            raise EmptyContext(f"term {term!r} does not occur in the draft")
        return generate_definition(
            normalize_term(term), fragments, self.gen_params, self.generator
        )

    def accept_definition(
        self, session_id: str, term: str, text: str, provenance: Provenance
    ) -> DraftSession:
        session = self.store.get(session_id)
        key = normalize_term(term)
        if any(normalize_term(t) == key for t, _, _ in session.accepted_definitions):
            raise DuplicateTerm(key)
        session.accepted_definitions.append((term, text, provenance))
        self.store.update(session)
        return session

    def export_article(self, session_id: str) -> str:
        session = self.store.get(session_id)
        return draft_definitions_article(
            [(t, d) for t, d, _ in session.accepted_definitions]
        )


def _ranked_to_dict(r: RankedDefinition) -> dict:
    return {
        "id": r.element.id,
        "term": r.element.term,
        "explanation": r.element.explanation,
        "kind": r.element.kind.value,
        "celex": r.element.source.celex,
        "article_heading": r.element.source.article_heading,
        "point_label": r.element.source.point_label,
        "references": r.element.references,
        "descriptor_overlap": r.descriptor_overlap,
        "jaccard": float(r.jaccard),
        "source_year": r.source_year,
    }


def _session_view(session: DraftSession) -> dict:
    return _session_to_record(session)


def create_app(service: DraftingService) -> FastAPI:
    app = FastAPI(title="lexforge", version="1")

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message})

    @app.exception_handler(UnknownSession)
    async def _unknown_session(_: Request, exc: UnknownSession):
        return error(404, "UnknownSession", str(exc))

    @app.exception_handler(DuplicateTerm)
    async def _duplicate_term(_: Request, exc: DuplicateTerm):
        return error(409, "DuplicateTerm", str(exc))

    @app.exception_handler(EmptyContext)
    async def _empty_context(_: Request, exc: EmptyContext):
        return error(422, "EmptyContext", str(exc))

    @app.exception_handler(ValidationFailure)
    async def _validation(_: Request, exc: ValidationFailure):
        return error(422, "ValidationFailure", str(exc))

    @app.exception_handler(ContextOverflow)
    async def _overflow(_: Request, exc: ContextOverflow):
        return error(422, "ContextOverflow", str(exc))

    @app.exception_handler(EndpointFailure)
    async def _endpoint(_: Request, exc: EndpointFailure):
        return error(502, "EndpointFailure", str(exc))

    @app.exception_handler(NoJsonFound)
    async def _nojson(_: Request, exc: NoJsonFound):
        return error(502, "NoJsonFound", str(exc))

    @app.exception_handler(MissingKey)
    async def _missingkey(_: Request, exc: MissingKey):
        return error(502, "MissingKey", str(exc))

    @app.post("/v1/sessions", status_code=201)
    async def create_session(payload: dict):
        session = service.create_session(
            title=payload.get("title", ""),
            descriptors=payload.get("eurovoc", []),
            sections_payload=payload.get("sections", []),
        )
        return _session_view(session)

    @app.get("/v1/sessions/{session_id}")
    async def get_session(session_id: str):
        return _session_view(service.store.get(session_id))

    @app.put("/v1/sessions/{session_id}/sections")
    async def put_sections(session_id: str, payload: dict):
        session = service.store.get(session_id)
        session.sections = _sections_from_payload(payload.get("sections", []))
        service.store.update(session)
        return _session_view(session)

    @app.get("/v1/sessions/{session_id}/terms/{term}")
    async def lookup(session_id: str, term: str):
        outcome = service.lookup_term(session_id, term)
        return {
            "case": outcome.case.value,
            "candidates": [_ranked_to_dict(r) for r in outcome.candidates],
        }

    @app.post("/v1/sessions/{session_id}/terms/{term}/generate")
    async def generate(session_id: str, term: str, k: int | None = None):
        result = service.generate_for_term(session_id, term, k=k)
        return result.to_dict()

    @app.post("/v1/sessions/{session_id}/definitions", status_code=201)
    async def accept(session_id: str, payload: dict):
        for key in ("term", "text", "provenance"):
            if key not in payload:
                raise ValidationFailure(f"missing field {key!r}")
        session = service.accept_definition(
            session_id, payload["term"], payload["text"], Provenance(payload["provenance"])
        )
        return _session_view(session)

    @app.get("/v1/sessions/{session_id}/article")
    async def article(session_id: str):
        return PlainTextResponse(service.export_article(session_id))

    return app
