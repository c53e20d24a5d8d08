"""Suffix-based category guessing for out-of-lexicon words.

Rules map a suffix to a lexical category and a connector-expression macro
defined by the active lexicon.  The longest matching suffix wins, the
remainder before the suffix must keep at least two characters, and a word
the lexicon already resolves is never guessed.  Words no rule covers fall
back to a configurable set of generic class macros.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ResourceError
from .grammar import Lexicon, LexiconEntry, Origin


class GuessStatus(enum.Enum):
    KNOWN = "known"
    GUESSED = "guessed"
    UNKNOWN_FALLBACK = "unknown"


@dataclass(frozen=True)
class MorphoGuessRule:
    suffix: str
    category: str
    macro: str

    @property
    def rule_id(self):
        return f"-{self.suffix}"


@dataclass(frozen=True)
class GuessOutcome:
    word: str
    status: GuessStatus
    category: str
    rule_used: str = None


MIN_STEM_LENGTH = 2

# fallback classes tried for words no suffix rule covers; the first category
# is the one reported for gold-category scoring
DEFAULT_FALLBACK = (
    ("n", "generic-noun"),
    ("v", "generic-verb"),
    ("a", "generic-adjective"),
)


def load_mg_rules(path) -> list:
    rules = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ResourceError(
                    "BAD_MG_RULE",
                    f"expected 'suffix<TAB>category<TAB>macro', got {line!r}",
                    path,
                    lineno,
                )
            suffix, category, macro = (p.strip() for p in parts)
            suffix = suffix.lstrip("-")
            if not suffix:
                raise ResourceError("BAD_MG_RULE", "empty suffix", path, lineno)
            if suffix in seen:
                raise ResourceError("BAD_MG_RULE", f"duplicate suffix -{suffix}", path, lineno)
            seen.add(suffix)
            rules.append(MorphoGuessRule(suffix, category, macro))
    # longest suffix first; ties impossible (suffixes unique)
    rules.sort(key=lambda r: (-len(r.suffix), r.suffix))
    return rules


def validate_rules(rules, lexicon: Lexicon):
    for rule in rules:
        if rule.macro not in lexicon.class_macros:
            raise ResourceError(
                "DANGLING_MACRO", f"MG rule -{rule.suffix} references undefined macro <{rule.macro}>"
            )


def _matching_rule(word, rules):
    lowered = word.lower()
    for rule in rules:
        if lowered.endswith(rule.suffix) and len(lowered) - len(rule.suffix) >= MIN_STEM_LENGTH:
            return rule
    return None


def guess(word: str, lexicon: Lexicon, rules) -> GuessOutcome:
    """Classify one surface form: KNOWN if the lexicon resolves it, else
    GUESSED by the longest matching suffix rule, else UNKNOWN_FALLBACK."""
    entries = lexicon.resolve(word)
    if entries:
        return GuessOutcome(word, GuessStatus.KNOWN, entries[0].category)
    rule = _matching_rule(word, rules)
    if rule is not None:
        return GuessOutcome(word, GuessStatus.GUESSED, rule.category, rule.rule_id)
    return GuessOutcome(word, GuessStatus.UNKNOWN_FALLBACK, DEFAULT_FALLBACK[0][0])


class GuessingLexicon:
    """Lexicon wrapper that supplies morpho-guessed or generic fallback
    entries for out-of-lexicon words; the parse engine and the validator
    only need its resolve()."""

    def __init__(self, lexicon: Lexicon, rules=(), fallback=DEFAULT_FALLBACK):
        self.lexicon = lexicon
        self.rules = list(rules)
        validate_rules(self.rules, lexicon)
        self.fallback = [
            (cat, macro) for cat, macro in fallback if macro in lexicon.class_macros
        ]
        self.class_macros = lexicon.class_macros
        self._cache = {}

    def classify(self, word: str) -> GuessOutcome:
        return guess(word, self.lexicon, self.rules)

    def resolve(self, word: str) -> list:
        hit = self._cache.get(word)
        if hit is not None:
            return list(hit)
        entries = self.lexicon.resolve(word)
        if not entries:
            rule = _matching_rule(word, self.rules)
            if rule is not None:
                entries = [
                    LexiconEntry(
                        word, rule.category, self.lexicon.class_macros[rule.macro], Origin.MORPHO_GUESS
                    )
                ]
            else:
                entries = [
                    LexiconEntry(word, cat, self.lexicon.class_macros[macro], Origin.UNKNOWN_FALLBACK)
                    for cat, macro in self.fallback
                ]
        self._cache[word] = entries
        return list(entries)


def classify_corpus(token_streams, lexicon: Lexicon, rules):
    """Classify every token occurrence; returns (outcomes, counts) where
    counts has per-occurrence UW, GW and OoL = UW + GW totals."""
    outcomes = []
    uw = gw = 0
    for tokens in token_streams:
        for token in tokens:
            surface = token if isinstance(token, str) else token.surface
            outcome = guess(surface, lexicon, rules)
            outcomes.append(outcome)
            if outcome.status is GuessStatus.UNKNOWN_FALLBACK:
                uw += 1
            elif outcome.status is GuessStatus.GUESSED:
                gw += 1
    return outcomes, {"UW": uw, "GW": gw, "OoL": uw + gw}
