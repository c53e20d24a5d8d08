"""Pre-parsing text normalization.

Order of stages on a raw document: sentence segmentation, extratextual
deletion (regex rules), tokenization, gene/species replacement by entity
codes, numeric/measure folding.  Presets switch individual stages on or
off; segmentation and tokenization always run.

All operations are pure given the loaded rule/dictionary objects, and every
replaced token keeps its original surface so the raw material can be
restored exactly.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import ResourceError


class TokenKind(enum.Enum):
    WORD = "word"
    GENE_CODE = "gene"
    SPECIES_CODE = "species"
    NUMBER = "number"
    TERM_HEAD = "term-head"


GENE_CODE_SURFACE = "GENE"
SPECIES_CODE_SURFACE = "SPECIES"
NUMBER_SURFACE = "NUMBER"


@dataclass(frozen=True)
class Token:
    surface: str
    kind: TokenKind = TokenKind.WORD
    source_span: tuple = (0, 0)
    original: str = None
    term: object = None  # TermRecord for TERM_HEAD tokens

    def restored(self) -> str:
        return self.original if self.original is not None else self.surface


@dataclass
class SentenceRecord:
    raw_text: str
    tokens: list

    def restored_surfaces(self):
        return [t.restored() for t in self.tokens]


# --- sentence segmentation ---------------------------------------------------

_SENT_END = ".!?"


def load_wordlist(path):
    items = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                items.append(line)
    return items


def segment_sentences(text: str, abbreviations=()) -> list:
    """Split a document into raw sentence strings.

    A sentence ends at ``. ! ?`` followed by whitespace and an uppercase
    letter or digit (or end of text), except after a listed abbreviation or
    anywhere inside a parenthesized span.
    """
    abbrevs = set(abbreviations)
    sentences = []
    start = 0
    depth = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth = max(0, depth - 1)
        elif ch in _SENT_END and depth == 0:
            j = i - 1
            while j >= 0 and not text[j].isspace():
                j -= 1
            token = text[j + 1 : i + 1]
            if not (ch == "." and token in abbrevs):
                k = i + 1
                while k < n and text[k] in _SENT_END:
                    k += 1
                m = k
                while m < n and text[m].isspace():
                    m += 1
                if m == n or (m > k and (text[m].isupper() or text[m].isdigit())):
                    sentence = text[start:k].strip()
                    if sentence:
                        sentences.append(sentence)
                    start = m
                    i = m
                    continue
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


# --- extratextual deletion ---------------------------------------------------

@dataclass(frozen=True)
class DeletionRule:
    rule_id: str
    pattern: object  # compiled regex


def load_deletion_rules(path):
    rules = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t", 1)
            if len(parts) != 2 or parts[0] != "DELETE":
                raise ResourceError(
                    "BAD_PATTERN", f"expected 'DELETE<TAB>regex', got {line!r}", path, lineno
                )
            try:
                pattern = re.compile(parts[1])
            except re.error as exc:
                raise ResourceError(
                    "BAD_PATTERN", f"bad regex {parts[1]!r}: {exc}", path, lineno
                ) from None
            rules.append(DeletionRule(f"rule-{lineno}", pattern))
    return rules


def strip_extratextual(sentence: str, rules) -> str:
    for rule in rules:
        sentence = rule.pattern.sub(" ", sentence)
    return re.sub(r"\s+", " ", sentence).strip()


# --- tokenization ------------------------------------------------------------

_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")
_WORD_RE = re.compile(r"[A-Za-z][A-Za-z0-9']*(?:-[A-Za-z0-9']+)*")


def tokenize(sentence: str) -> list:
    """Whitespace and punctuation splitting; hyphenated compounds and
    decimal numbers stay whole; single-letter abbreviations keep their dot
    ("B."); other punctuation is dropped."""
    tokens = []
    i = 0
    n = len(sentence)
    while i < n:
        ch = sentence[i]
        if ch.isspace():
            i += 1
            continue
        m = _NUMBER_RE.match(sentence, i)
        if m and ch.isdigit():
            tokens.append(Token(m.group(0), TokenKind.WORD, (i, m.end())))
            i = m.end()
            continue
        m = _WORD_RE.match(sentence, i)
        if m:
            end = m.end()
            surface = m.group(0)
            if len(surface) == 1 and surface.isalpha() and end < n and sentence[end] == ".":
                surface += "."
                end += 1
            tokens.append(Token(surface, TokenKind.WORD, (i, end)))
            i = end
            continue
        i += 1  # punctuation and anything else is dropped
    return tokens


# --- entity replacement ------------------------------------------------------

GENE = "GENE"
SPECIES = "SPECIES"


class EntityDictionary:
    """Surface form -> GENE | SPECIES with a longest-match index over token
    sequences.  Case-sensitive by default."""

    def __init__(self, forms, case_sensitive=True):
        self.case_sensitive = case_sensitive
        self._index = {}
        kinds = {}
        for surface, kind in forms:
            if kind not in (GENE, SPECIES):
                raise ResourceError("BAD_ENTITY_KIND", f"unknown kind {kind!r} for {surface!r}")
            key = surface if case_sensitive else surface.lower()
            if key in kinds and kinds[key] != kind:
                raise ResourceError(
                    "ENTITY_CONFLICT", f"{surface!r} maps to both GENE and SPECIES"
                )
            kinds[key] = kind
            parts = tuple(t.surface for t in tokenize(surface if case_sensitive else surface.lower()))
            if not parts:
                continue
            self._index.setdefault(parts[0], []).append((parts, kind))
        for first in self._index:
            self._index[first].sort(key=lambda e: -len(e[0]))

    @classmethod
    def load(cls, path, case_sensitive=True):
        forms = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ResourceError(
                        "BAD_ENTITY_LINE", f"expected 'surface<TAB>kind', got {line!r}", path, lineno
                    )
                forms.append((parts[0], parts[1]))
        return cls(forms, case_sensitive)

    def match_at(self, surfaces, i):
        """Longest entity match starting at token i; (length, kind) or None."""
        key = surfaces[i] if self.case_sensitive else surfaces[i].lower()
        for parts, kind in self._index.get(key, ()):
            if len(parts) <= len(surfaces) - i:
                window = surfaces[i : i + len(parts)]
                if not self.case_sensitive:
                    window = [w.lower() for w in window]
                if tuple(window) == parts:
                    return len(parts), kind
        return None


def replace_entities(tokens, entity_dict: EntityDictionary) -> list:
    """Maximal-length dictionary matches become a single GENE_CODE or
    SPECIES_CODE token carrying the original surface."""
    surfaces = [t.surface for t in tokens]
    out = []
    i = 0
    while i < len(tokens):
        hit = entity_dict.match_at(surfaces, i)
        if hit:
            length, kind = hit
            span = (tokens[i].source_span[0], tokens[i + length - 1].source_span[1])
            original = " ".join(t.restored() for t in tokens[i : i + length])
            if kind == GENE:
                out.append(Token(GENE_CODE_SURFACE, TokenKind.GENE_CODE, span, original))
            else:
                out.append(Token(SPECIES_CODE_SURFACE, TokenKind.SPECIES_CODE, span, original))
            i += length
        else:
            out.append(tokens[i])
            i += 1
    return out


# --- numeric folding ---------------------------------------------------------

def normalize_numeric(tokens, units=()) -> list:
    """Each maximal numeric expression (optionally followed by a measure
    unit) becomes one NUMBER token; spelled-out numbers are left alone."""
    unit_set = set(units)
    out = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.kind is TokenKind.WORD and _NUMBER_RE.fullmatch(tok.surface):
            end = i + 1
            if end < len(tokens) and tokens[end].kind is TokenKind.WORD and tokens[end].surface in unit_set:
                end += 1
            span = (tok.source_span[0], tokens[end - 1].source_span[1])
            original = " ".join(t.restored() for t in tokens[i:end])
            out.append(Token(NUMBER_SURFACE, TokenKind.NUMBER, span, original))
            i = end
        else:
            out.append(tok)
            i += 1
    return out


# --- bundled normalizer ------------------------------------------------------

class Normalizer:
    """Loaded normalization resources plus stage switches."""

    def __init__(
        self,
        abbreviations=(),
        deletion_rules=(),
        entity_dict=None,
        units=(),
        strip=True,
        entities=True,
        numeric=True,
    ):
        self.abbreviations = list(abbreviations)
        self.deletion_rules = list(deletion_rules)
        self.entity_dict = entity_dict
        self.units = list(units)
        self.strip = strip and bool(deletion_rules)
        self.entities = entities and entity_dict is not None
        self.numeric = numeric

    def segment(self, text):
        return segment_sentences(text, self.abbreviations)

    def sentence_record(self, raw_sentence: str) -> SentenceRecord:
        text = raw_sentence
        if self.strip:
            text = strip_extratextual(text, self.deletion_rules)
        tokens = tokenize(text)
        tokens = self.normalize_tokens(tokens)
        return SentenceRecord(raw_sentence, tokens)

    def normalize_tokens(self, tokens):
        if self.entities:
            tokens = replace_entities(tokens, self.entity_dict)
        if self.numeric:
            tokens = normalize_numeric(tokens, self.units)
        return tokens
