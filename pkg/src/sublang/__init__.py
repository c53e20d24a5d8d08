"""Link-grammar dependency parsing with sublanguage adaptation.

The package provides a small link-grammar core (dictionaries, disjuncts,
connector matching), an exact linkage counter/enumerator, a pre-parsing
normalizer (segmentation, entity codes, numeric folding), a suffix-based
category guesser for out-of-lexicon words, a multiword-term simplifier
with parse re-expansion, and an evaluation harness comparing the lp /
lp-bio / lp-bio-t configurations.
"""

from .engine import (
    Link,
    Linkage,
    ParseResult,
    count_linkages,
    enumerate_linkages,
    render_diagram,
    validate_linkage,
)
from .grammar import (
    Connector,
    Direction,
    Disjunct,
    Lexicon,
    LexiconEntry,
    Origin,
    apply_overlay,
    connector_match,
    expand_disjuncts,
    load_dictionary,
)
from .morpho import GuessOutcome, GuessStatus, GuessingLexicon, guess, load_mg_rules
from .normalize import (
    EntityDictionary,
    Normalizer,
    SentenceRecord,
    Token,
    TokenKind,
    normalize_numeric,
    replace_entities,
    segment_sentences,
    strip_extratextual,
    tokenize,
)
from .pipeline import ConfigSpec, Pipeline
from .terms import TermRecord, load_term_dictionary, reexpand, simplify

__version__ = "0.1.0"

__all__ = [
    "Connector",
    "ConfigSpec",
    "Direction",
    "Disjunct",
    "EntityDictionary",
    "GuessOutcome",
    "GuessStatus",
    "GuessingLexicon",
    "Lexicon",
    "LexiconEntry",
    "Link",
    "Linkage",
    "Normalizer",
    "Origin",
    "ParseResult",
    "Pipeline",
    "SentenceRecord",
    "TermRecord",
    "Token",
    "TokenKind",
    "apply_overlay",
    "connector_match",
    "count_linkages",
    "enumerate_linkages",
    "expand_disjuncts",
    "guess",
    "load_dictionary",
    "load_mg_rules",
    "load_term_dictionary",
    "normalize_numeric",
    "reexpand",
    "render_diagram",
    "replace_entities",
    "segment_sentences",
    "simplify",
    "strip_extratextual",
    "tokenize",
    "validate_linkage",
]
