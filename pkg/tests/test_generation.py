import json
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexforge.corpus import CelexId
from lexforge.definitions import DefinitionElement, DefinitionKind, SourceRef, citation_to_celex, parse_citation
from lexforge.errors import (
    ContextOverflow,
    DuplicateTerm,
    EmptyContext,
    EndpointFailure,
    MissingKey,
    NoJsonFound,
    UnresolvableTarget,
)
from lexforge.generation import (
    PROMPT_TEMPLATE,
    GenParams,
    MockGenerator,
    build_prompt,
    build_prompt_within_budget,
    compose_cited_definition,
    draft_definitions_article,
    generate,
    generate_definition,
    parse_generation,
)


def template_segments():
    """Constant template parts around the substitution sites, in order."""
    return re.split(r"\{term\}|\{term_json\}|\{sentences\}", PROMPT_TEMPLATE)


def assert_matches_template(rendered: str):
    """Rendered text must contain every constant segment, in order, covering it fully."""
    pos = 0
    segments = template_segments()
    for i, segment in enumerate(segments):
        found = rendered.find(segment, pos)
        assert found != -1, f"template segment {i} missing"
        if i == 0:
            assert found == 0
        pos = found + len(segment)
    assert pos == len(rendered)


class TestBuildPrompt:
    def test_template_rendering(self):
        prompt = build_prompt("fuel producer", ["Sentence one.", "Sentence two.", "Sentence three."])
        assert prompt.rendered.startswith(
            "Act as a Lawyer drafting European Legislative documents to be published "
            "on the Eur-Lex website."
        )
        between = prompt.rendered.split("---")[1]
        assert between.strip().split("\n") == ["Sentence one.", "Sentence two.", "Sentence three."]
        assert "Define the term: fuel producer," in prompt.rendered
        assert '"term": "fuel producer"' in prompt.rendered
        assert_matches_template(prompt.rendered)

    def test_empty_context(self):
        with pytest.raises(EmptyContext):
            build_prompt("x", [])

    def test_apostrophe_term_keeps_json_skeleton_wellformed(self):
        prompt = build_prompt("producer's licence", ["Some sentence."])
        assert "Define the term: producer's licence," in prompt.rendered
        skeleton = re.search(r'"term": "(.*)"', prompt.rendered)
        assert json.loads(f'{{"term": "{skeleton.group(1)}"}}')["term"] == "producer's licence"


class TestGenerate:
    def test_mock_deterministic(self):
        prompt = build_prompt("fuel producer", ["A fuel producer produces fuels."])
        params = GenParams()
        first = generate(prompt, params, MockGenerator())
        second = generate(prompt, params, MockGenerator())
        assert first == second
        assert json.loads(first)["term"] == "fuel producer"

    def test_context_overflow_before_network(self):
        class Exploding:
            def complete(self, prompt, params):
                raise AssertionError("network hit despite overflow")

        prompt = build_prompt("t", ["word " * 5000])
        with pytest.raises(ContextOverflow):
            generate(prompt, GenParams(), Exploding())

    def test_endpoint_http_error(self, monkeypatch):
        import httpx

        from lexforge.generation import HttpGenerator

        def fake_post(url, **kwargs):
            return httpx.Response(500, request=httpx.Request("POST", url))

        monkeypatch.setattr(httpx, "post", fake_post)
        prompt = build_prompt("t", ["short sentence"])
        with pytest.raises(EndpointFailure) as exc:
            generate(prompt, GenParams(), HttpGenerator("http://example.invalid/v1/completions"))
        assert exc.value.status == 500

    def test_budget_drops_lowest_scored(self):
        # long fragments force the budget to bind; kept ones are the first (highest-scored)
        from lexforge.retrieval import ScoredFragment
        from lexforge.corpus import Fragment

        def frag(i, count):
            return ScoredFragment(
                fragment=Fragment(
                    fragment_id=f"f{i}",
                    celex=None,
                    section_position=0,
                    paragraph_position=i,
                    sentence_position=0,
                    text=("sentence %d " % i) + "word " * 800,
                ),
                phrase_count=count,
            )

        fragments = [frag(0, 5), frag(1, 4), frag(2, 3), frag(3, 2)]
        prompt = build_prompt_within_budget("term", fragments, GenParams())
        assert 0 < len(prompt.fragments) < 4
        assert prompt.fragments == tuple(f.fragment.text for f in fragments[: len(prompt.fragments)])


class TestParseGeneration:
    def test_appendix_example(self):
        raw = (
            '{"term": "abandoned land", "definition": "\'abandoned land\' means land that '
            "has been unused or neglected for an extended period of time, often due to "
            'economic, environmental, or social reasons;"}'
        )
        result = parse_generation(raw, "abandoned land")
        assert result.term == "abandoned land"
        assert result.definition.startswith("'abandoned land' means land")
        assert result.word_count == len(result.definition.split())
        assert result.warnings == []

    def test_no_json(self):
        with pytest.raises(NoJsonFound):
            parse_generation("I cannot help with that.", "x")

    def test_missing_key(self):
        with pytest.raises(MissingKey) as exc:
            parse_generation('{"term": "x"}', "x")
        assert exc.value.key == "definition"

    def test_surrounding_prose_and_fences(self):
        raw = 'Sure! Here is the JSON:\n```json\n{"term": "x", "definition": "```a b c```"}\n```\nDone.'
        result = parse_generation(raw, "x")
        assert result.definition == "a b c"
        assert result.word_count == 3
        assert result.length_ok is False

    def test_term_mismatch_is_warning(self):
        result = parse_generation('{"term": "other", "definition": "d"}', "x")
        assert result.warnings

    def test_length_ok_window(self):
        definition = " ".join(["word"] * 30)
        result = parse_generation(json.dumps({"term": "x", "definition": definition}), "x")
        assert result.length_ok is True
        assert result.word_count == 30

    @settings(max_examples=300, deadline=None)
    @given(st.text(max_size=400))
    def test_parse_totality(self, raw):
        try:
            parse_generation(raw, "term")
        except (NoJsonFound, MissingKey):
            pass

    @given(
        term=st.text(min_size=1, max_size=30),
        definition=st.text(min_size=1, max_size=200).filter(lambda s: s.strip().strip("`").strip()),
    )
    def test_roundtrip(self, term, definition):
        raw = json.dumps({"term": term, "definition": definition})
        result = parse_generation(raw, term)
        assert result.term == term
        assert result.definition == definition.strip().strip("`").strip()


class TestRetry:
    def test_retry_once_then_surface(self):
        class FlakyOnce:
            def __init__(self):
                self.calls = 0

            def complete(self, prompt, params):
                self.calls += 1
                if self.calls == 1:
                    return "no json here"
                return json.dumps({"term": prompt.term, "definition": "a definition"})

        from lexforge.retrieval import ScoredFragment
        from lexforge.corpus import Fragment

        frag = ScoredFragment(
            fragment=Fragment(
                fragment_id="f0",
                celex=None,
                section_position=0,
                paragraph_position=0,
                sentence_position=0,
                text="context sentence",
            ),
            phrase_count=1,
        )
        endpoint = FlakyOnce()
        result = generate_definition("term", [frag], GenParams(), endpoint)
        assert endpoint.calls == 2
        assert result.definition == "a definition"

        class AlwaysBroken:
            def complete(self, prompt, params):
                return "still no json"

        with pytest.raises(NoJsonFound):
            generate_definition("term", [frag], GenParams(), AlwaysBroken())


def _static_element(celex, heading, point, term):
    return DefinitionElement(
        id=f"{celex}-{point}-{term}",
        term=term,
        explanation="means something static",
        references=[],
        kind=DefinitionKind.STATIC,
        source=SourceRef(celex=celex, article_heading=heading, point_label=point),
        aliases_group="g",
    )


class TestComposeCitedDefinition:
    def test_bidding_zone(self):
        target = _static_element("32019R0943", "Article 2 Definitions", None, "bidding zone")
        text = compose_cited_definition("bidding zone", target)
        assert text == (
            "'bidding zone' means bidding zone as defined in Article 2 of "
            "Regulation (EU) 2019/943;"
        )

    def test_point_clause(self):
        target = _static_element("32019L0944", "Article 2 Definitions", "31", "renewable energy")
        text = compose_cited_definition("renewable energy", target)
        assert "point (31) of Article 2 of Directive (EU) 2019/944" in text

    def test_dynamic_without_targets(self):
        target = _static_element("32019R0943", "Article 2 Definitions", None, "t")
        target.kind = DefinitionKind.DYNAMIC
        with pytest.raises(UnresolvableTarget):
            compose_cited_definition("t", target)

    def test_composition_roundtrip(self):
        target = _static_element("32019L0944", "Article 2 Definitions", "31", "renewable energy")
        text = compose_cited_definition("renewable energy", target)
        (cite,) = parse_citation(text)
        assert citation_to_celex(cite).raw == target.source.celex


class TestDraftArticle:
    def test_two_points(self):
        article = draft_definitions_article(
            [("bidding zone", "'bidding zone' means an area;"), ("fuel producer", "'fuel producer' means a producer;")]
        )
        lines = article.splitlines()
        assert lines[0] == "Article 1 — Definitions"
        assert lines[2] == "(1) 'bidding zone' means an area;"
        assert lines[3] == "(2) 'fuel producer' means a producer."

    def test_empty(self):
        article = draft_definitions_article([])
        assert article.splitlines() == ["Article 1 — Definitions"]

    def test_duplicate_terms(self):
        with pytest.raises(DuplicateTerm):
            draft_definitions_article([("Zone", "a"), ("zone", "b")])
