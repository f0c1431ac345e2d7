"""Prompt assembly, the external-generator client, and output validation.

The generator is any OpenAI-compatible completion endpoint; the model
behind it is configuration.  A deterministic mock generator backs all
offline tests.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field

import httpx

from .definitions import DefinitionElement, DefinitionKind, Instrument
from .errors import (
    ContextOverflow,
    DuplicateTerm,
    EmptyContext,
    EndpointFailure,
    MissingKey,
    NoJsonFound,
    UnresolvableTarget,
)
from .retrieval import ScoredFragment, normalize_term

PROMPT_TEMPLATE = """Act as a Lawyer drafting European Legislative documents to be published on the Eur-Lex website.

Define the term: {term}, based on the sentences provided between the triple dashes where new line characters split different sentences.
---
{sentences}
---

Provide a clear and concise definition strictly within 25 to 45 words that accurately conveys the meaning within the context of the sentences.

Give your output in the following JSON format:
{{
"term": "{term_json}"
"definition": "```output text```"
}}
ONLY return the JSON with the keys: [term, definition], do not add ANYTHING, NO INTERPRETATION!
"""

MIN_DEFINITION_WORDS = 25
MAX_DEFINITION_WORDS = 45

COMPLETION_RESERVE_TOKENS = 128


@dataclass(frozen=True)
class GenParams:
    temperature: float = 0.2
    top_k: int = 20
    top_p: float = 0.6
    repetition_penalty: float = 1.2
    context_length: int = 4096
    model_name: str = "vicuna-7b-v1.5"

    @classmethod
    def from_env(cls) -> "GenParams":
        return cls(model_name=os.environ.get("LEXFORGE_GEN_MODEL", cls.model_name))


@dataclass(frozen=True)
class PromptSpec:
    term: str
    fragments: tuple[str, ...]
    rendered: str


@dataclass
class GenerationResult:
    term: str
    definition: str
    word_count: int
    length_ok: bool
    raw_response: str
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "term": self.term,
            "definition": self.definition,
            "word_count": self.word_count,
            "length_ok": self.length_ok,
            "warnings": self.warnings,
        }


def estimate_tokens(text: str) -> int:
    """Conservative token estimate: one token per 4 characters, rounded up."""
    return math.ceil(len(text) / 4)


def _json_escape(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)[1:-1]


def build_prompt(term: str, fragments: list[ScoredFragment | str]) -> PromptSpec:
    """Render the generation prompt with fragments in retrieval order."""
    if not fragments:
        raise EmptyContext("no context fragments for term " + repr(term))
    texts = tuple(f if isinstance(f, str) else f.fragment.text for f in fragments)
    rendered = (
        PROMPT_TEMPLATE.replace("{term}", term)
        .replace("{term_json}", _json_escape(term))
        .replace("{sentences}", "\n".join(texts))
    )
    return PromptSpec(term=term, fragments=texts, rendered=rendered)


def build_prompt_within_budget(
    term: str, fragments: list[ScoredFragment], params: GenParams
) -> PromptSpec:
    """Build the prompt, dropping lowest-scored fragments while it overflows."""
    kept = list(fragments)
    while kept:
        prompt = build_prompt(term, kept)
        if estimate_tokens(prompt.rendered) + COMPLETION_RESERVE_TOKENS <= params.context_length:
            return prompt
        kept.pop()
    raise ContextOverflow(f"no fragment subset fits the {params.context_length}-token context")


class HttpGenerator:
    """Client for an OpenAI-compatible completion endpoint."""

    def __init__(self, url: str, api_key: str = "", timeout: float = 120.0):
        self.url = url.rstrip("/")
        self.api_key = api_key
        self.timeout = timeout

    def complete(self, prompt: PromptSpec, params: GenParams) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": params.model_name,
            "prompt": prompt.rendered,
            "temperature": params.temperature,
            "top_p": params.top_p,
            "top_k": params.top_k,
            "repetition_penalty": params.repetition_penalty,
            "max_tokens": COMPLETION_RESERVE_TOKENS,
        }
        try:
            resp = httpx.post(self.url, json=payload, headers=headers, timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise EndpointFailure(str(exc)) from exc
        if resp.status_code >= 400:
            raise EndpointFailure(f"endpoint returned {resp.status_code}", status=resp.status_code)
        try:
            body = resp.json()
            choice = body["choices"][0]
            return choice.get("text") or choice["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise EndpointFailure(f"unparseable endpoint response: {exc}") from exc

    @classmethod
    def from_env(cls) -> "HttpGenerator":
        url = os.environ.get("LEXFORGE_GEN_URL")
        if not url:
            raise EndpointFailure("LEXFORGE_GEN_URL not configured")
        return cls(url=url, api_key=os.environ.get("LEXFORGE_GEN_KEY", ""))


_MOCK_VOCAB = (
    "arrangement facility process entity activity infrastructure measure "
    "mechanism obligation undertaking installation operation framework "
    "procedure requirement capacity network market supply production"
).split()


class MockGenerator:
    """Deterministic local generator keyed by the prompted term."""

    def complete(self, prompt: PromptSpec, params: GenParams) -> str:
        seed = sum(prompt.term.encode("utf-8"))
        filler = " ".join(_MOCK_VOCAB[(seed + i) % len(_MOCK_VOCAB)] for i in range(20))
        definition = (
            f"'{prompt.term}' means any {filler} established for the purposes of this Regulation;"
        )
        return json.dumps({"term": prompt.term, "definition": definition})


def generate(prompt: PromptSpec, params: GenParams, endpoint) -> str:
    """One completion call; raises ContextOverflow before any network activity."""
    if estimate_tokens(prompt.rendered) + COMPLETION_RESERVE_TOKENS > params.context_length:
        raise ContextOverflow(
            f"prompt estimate exceeds {params.context_length}-token context"
        )
    return endpoint.complete(prompt, params)


def _first_json_object(raw: str) -> dict:
    for start, ch in enumerate(raw):
        if ch != "{":
            continue
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, len(raw)):
            c = raw[i]
            if in_string:
                if escaped:
                    escaped = False
                elif c == "\\":
                    escaped = True
                elif c == '"':
                    in_string = False
            elif c == '"':
                in_string = True
            elif c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 0:
                    try:
                        obj = json.loads(raw[start : i + 1])
                    except json.JSONDecodeError:
                        break
                    if isinstance(obj, dict):
                        return obj
                    break
    raise NoJsonFound("no JSON object in response")


def parse_generation(raw: str, expected_term: str) -> GenerationResult:
    """Extract and validate the generator's JSON answer.

    Tolerates surrounding prose and markdown fences; a term mismatch is a
    warning, not an error.
    """
    obj = _first_json_object(raw)
    if "term" not in obj:
        raise MissingKey("term")
    if "definition" not in obj:
        raise MissingKey("definition")
    definition = str(obj["definition"]).strip().strip("`").strip()
    word_count = len(definition.split())
    warnings = []
    if normalize_term(str(obj["term"])) != normalize_term(expected_term):
        warnings.append(f"term mismatch: expected {expected_term!r}, got {obj['term']!r}")
    return GenerationResult(
        term=str(obj["term"]),
        definition=definition,
        word_count=word_count,
        length_ok=MIN_DEFINITION_WORDS <= word_count <= MAX_DEFINITION_WORDS,
        raw_response=raw,
        warnings=warnings,
    )


def generate_definition(
    term: str, fragments: list[ScoredFragment], params: GenParams, endpoint
) -> GenerationResult:
    """Full RAG step: prompt, call, parse; one retry on malformed output."""
    prompt = build_prompt_within_budget(term, fragments, params)
    raw = generate(prompt, params, endpoint)
    try:
        return parse_generation(raw, term)
    except (NoJsonFound, MissingKey):
        raw = generate(prompt, params, endpoint)
        return parse_generation(raw, term)


def compose_cited_definition(term: str, target: DefinitionElement) -> str:
    """Cite an existing definition instead of generating one.

    A dynamic target is followed to its resolved static element.
    """
    if target.kind is DefinitionKind.DYNAMIC:
        if not target.resolved_targets:
            raise UnresolvableTarget(f"dynamic target {target.id} has no resolved references")
        target = target.resolved_targets[0]
    article_m = re.search(r"Article\s+(\d+)", target.source.article_heading, re.IGNORECASE)
    if not article_m:
        raise UnresolvableTarget(f"target {target.id} has no article number in heading")
    celex = target.source.celex
    instrument = {"L": Instrument.DIRECTIVE, "R": Instrument.REGULATION, "D": Instrument.DECISION}.get(
        celex[5]
    )
    if instrument is None:
        raise UnresolvableTarget(f"unsupported instrument letter in Celex {celex}")
    point = f"point ({target.source.point_label}) of " if target.source.point_label else ""
    citation = (
        f"{point}Article {article_m.group(1)} of {instrument.value} "
        f"(EU) {int(celex[1:5])}/{int(celex[6:])}"
    )
    return f"'{term}' means {term} as defined in {citation};"


def draft_definitions_article(
    accepted: list[tuple[str, str]], article_number: int = 1
) -> str:
    """Assemble accepted (term, definition) entries into a Definitions article."""
    seen: set[str] = set()
    for term, _ in accepted:
        key = normalize_term(term)
        if key in seen:
            raise DuplicateTerm(key)
        seen.add(key)
    lines = [f"Article {article_number} — Definitions"]
    if accepted:
        lines.append("For the purposes of this act, the following definitions apply:")
    for i, (term, definition) in enumerate(accepted, start=1):
        body = definition.strip().rstrip(";.")
        terminator = "." if i == len(accepted) else ";"
        lines.append(f"({i}) {body}{terminator}")
    return "\n".join(lines)
