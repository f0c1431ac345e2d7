"""lexforge: drafting assistant for Definitions articles in EU-style legal acts."""

from .corpus import CelexId, Document, Fragment, Section, SectionKind
from .definitions import (
    CitationExpr,
    DefinitionElement,
    DefinitionKind,
    ResolutionReport,
)
from .generation import GenParams, GenerationResult, PromptSpec
from .retrieval import InvertedIndex, RankedDefinition, ScoredFragment
from .service import DraftSession, LookupOutcome

__all__ = [
    "CelexId",
    "Document",
    "Section",
    "SectionKind",
    "Fragment",
    "DefinitionElement",
    "DefinitionKind",
    "CitationExpr",
    "ResolutionReport",
    "InvertedIndex",
    "RankedDefinition",
    "ScoredFragment",
    "GenParams",
    "PromptSpec",
    "GenerationResult",
    "DraftSession",
    "LookupOutcome",
]

__version__ = "0.1.0"
