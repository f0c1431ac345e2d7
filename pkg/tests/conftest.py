import json

import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--live",
        action="store_true",
        default=False,
        help="run network-gated tests against live EUR-Lex",
    )

from lexforge.corpus import CelexId, parse_legal_act

DIRECTIVE_944_ACT = {
    "celex": "32019L0944",
    "title": "on common rules for the internal market for electricity and amending Directive 2012/27/EU",
    "year": 2019,
    "eurovoc": ["electrical energy", "energy policy", "electricity supply", "internal market"],
    "zones": [
        {
            "kind": "header",
            "heading": None,
            "paragraphs": [
                "DIRECTIVE (EU) 2019/944 OF THE EUROPEAN PARLIAMENT AND OF THE COUNCIL "
                "of 5 June 2019 on common rules for the internal market for electricity"
            ],
        },
        {
            "kind": "recital",
            "heading": None,
            "paragraphs": [
                "(1) The internal market in electricity aims to deliver real choice for all Union customers."
            ],
        },
        {
            "kind": "article",
            "heading": "Article 1 Subject matter",
            "paragraphs": [
                "This Directive establishes common rules for the generation, transmission, "
                "distribution, energy storage and supply of electricity."
            ],
        },
        {
            "kind": "article",
            "heading": "Article 2 Definitions",
            "paragraphs": [
                "For the purposes of this Directive, the following definitions apply:",
                "(1) 'customer' means a wholesale or final customer of electricity;",
                "(31) 'energy from renewable sources' or 'renewable energy' means energy from "
                "renewable non-fossil sources, namely wind, solar (solar thermal and solar "
                "photovoltaic) and geothermal energy, ambient energy, tide, wave and other ocean "
                "energy, hydropower, biomass, landfill gas, sewage treatment plant gas, and biogas;",
            ],
        },
        {"kind": "attachment", "heading": "ANNEX I", "paragraphs": ["Minimum requirements for billing."]},
    ],
}

REGULATION_943_ACT = {
    "celex": "32019R0943",
    "title": "on the internal market for electricity",
    "year": 2019,
    "eurovoc": ["electrical energy", "energy policy", "energy market"],
    "zones": [
        {
            "kind": "header",
            "heading": None,
            "paragraphs": [
                "REGULATION (EU) 2019/943 OF THE EUROPEAN PARLIAMENT AND OF THE COUNCIL "
                "of 5 June 2019 on the internal market for electricity"
            ],
        },
        {
            "kind": "article",
            "heading": "Article 2 Definitions",
            "paragraphs": [
                "The following definitions apply:",
                "(50) 'energy from renewable sources' or 'renewable energy' means energy from "
                "renewable sources as defined in point (31) of Article 2 of Directive (EU) 2019/944;",
                "(65) 'bidding zone' means the largest geographical area within which market "
                "participants are able to exchange energy without capacity allocation;",
            ],
        },
    ],
}

DRAFT_1184_SECTIONS = [
    {
        "kind": "article",
        "heading": "Article 1 Scope",
        "paragraphs": [
            "This Regulation lays down detailed rules for the production of renewable liquid "
            "and gaseous transport fuels of non-biological origin."
        ],
    },
    {
        "kind": "article",
        "heading": "Article 3 Obligations",
        "paragraphs": [
            "A fuel producer shall account for all electricity used in the production of "
            "renewable fuels. The fuel producer shall conclude renewables power purchase "
            "agreements with economic operators. Where a fuel producer sources electricity "
            "from the grid, the fuel producer shall demonstrate temporal correlation.",
            "Installations producing renewable fuels shall be operated by the fuel producer "
            "in a bidding zone where the proportion of renewable electricity exceeds 90 %.",
        ],
    },
]


@pytest.fixture
def directive_944():
    return parse_legal_act(json.dumps(DIRECTIVE_944_ACT), CelexId.parse("32019L0944"))


@pytest.fixture
def regulation_943():
    return parse_legal_act(json.dumps(REGULATION_943_ACT), CelexId.parse("32019R0943"))


@pytest.fixture
def small_corpus(directive_944, regulation_943):
    return [directive_944, regulation_943]


@pytest.fixture
def resolved_elements(small_corpus):
    from lexforge.definitions import (
        extract_definitions,
        locate_definitions_article,
        resolve_citations,
    )

    elements = []
    for doc in small_corpus:
        section = locate_definitions_article(doc)
        assert section is not None
        elements.extend(extract_definitions(section, doc.celex))
    elements, _ = resolve_citations(elements)
    return elements


@pytest.fixture
def doc_meta(small_corpus):
    return {d.celex.raw: (d.eurovoc_descriptors, d.year) for d in small_corpus}
