"""Rule-chain reasoning benchmark with dynamic context elaboration."""

from .lexicon import Lexicon, default_lexicon
from .logic import (
    FormalProblem,
    Literal,
    Predicate,
    Rule,
    classify_statement,
    closure,
    derive_chain,
    effective_distraction,
    transpose,
)

__all__ = [
    "Lexicon",
    "default_lexicon",
    "FormalProblem",
    "Literal",
    "Predicate",
    "Rule",
    "classify_statement",
    "closure",
    "derive_chain",
    "effective_distraction",
    "transpose",
]

__version__ = "0.1.0"
