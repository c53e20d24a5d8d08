"""Multiword-term recognition, head reduction and parse re-expansion.

Recognized terms are replaced by their syntactic head before parsing, which
shrinks the parse problem; afterwards the term's stored internal analysis
is spliced back into the linkage at the original token positions.  Terms
are never concatenated into single lexicon entries, so the lexicon does not
grow: a head token resolves under the head word's own entries.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import Link, Linkage, crossing
from .errors import ReexpansionConflict, ResourceError
from .normalize import Token, TokenKind

DEFAULT_INTERNAL_LABEL = "AN"


@dataclass(frozen=True)
class TermRecord:
    tokens: tuple        # lowercase surface forms, length >= 2
    head_index: int
    internal_links: tuple  # (i, j, label) over term-internal positions

    def __len__(self):
        return len(self.tokens)

    @property
    def surface(self):
        return " ".join(self.tokens)


def serial_chain(length, label=DEFAULT_INTERNAL_LABEL):
    """Default internal analysis: each token linked to its right neighbour."""
    return tuple((i, i + 1, label) for i in range(length - 1))


def _validate_term(term: TermRecord, path=None, line=None):
    n = len(term.tokens)
    if n < 2:
        raise ResourceError("SYNTAX_ERROR", f"term needs >= 2 tokens: {term.surface!r}", path, line)
    if not 0 <= term.head_index < n:
        raise ResourceError(
            "BAD_HEAD_INDEX",
            f"head index {term.head_index} out of range for {term.surface!r}",
            path,
            line,
        )
    links = [Link(i, j, lab) for i, j, lab in term.internal_links]
    for l in links:
        if not (0 <= l.left < l.right < n):
            raise ResourceError(
                "MALFORMED_LINKS", f"link {l} out of range in {term.surface!r}", path, line
            )
    if len({(l.left, l.right) for l in links}) != len(links):
        raise ResourceError("MALFORMED_LINKS", f"duplicate link pair in {term.surface!r}", path, line)
    for i in range(len(links)):
        for j in range(i + 1, len(links)):
            if crossing(links[i], links[j]):
                raise ResourceError(
                    "MALFORMED_LINKS", f"crossing internal links in {term.surface!r}", path, line
                )
    # every token reachable from the head
    adjacency = {i: set() for i in range(n)}
    for l in links:
        adjacency[l.left].add(l.right)
        adjacency[l.right].add(l.left)
    seen = {term.head_index}
    stack = [term.head_index]
    while stack:
        for nxt in adjacency[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    if len(seen) != n:
        raise ResourceError(
            "MALFORMED_LINKS", f"internal analysis of {term.surface!r} not connected to head", path, line
        )


class TermIndex:
    """Longest-match index over lowercased token sequences."""

    def __init__(self, terms):
        self._by_first = {}
        for term in terms:
            _validate_term(term)
            self._by_first.setdefault(term.tokens[0], []).append(term)
        for first in self._by_first:
            self._by_first[first].sort(key=lambda t: -len(t.tokens))

    def __len__(self):
        return sum(len(v) for v in self._by_first.values())

    def match_at(self, lowered_surfaces, i):
        for term in self._by_first.get(lowered_surfaces[i], ()):
            n = len(term.tokens)
            if n <= len(lowered_surfaces) - i and tuple(lowered_surfaces[i : i + n]) == term.tokens:
                return term
        return None


def load_term_dictionary(path) -> TermIndex:
    """One record per line: ``token token ...<TAB>head<TAB>links`` where
    links is ``i-j:LABEL;...`` or empty for the generated serial default."""
    terms = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise ResourceError(
                    "SYNTAX_ERROR", f"expected 2 or 3 tab-separated fields, got {line!r}", path, lineno
                )
            tokens = tuple(parts[0].lower().split())
            try:
                head = int(parts[1])
            except ValueError:
                raise ResourceError(
                    "SYNTAX_ERROR", f"head index must be an integer: {parts[1]!r}", path, lineno
                ) from None
            links = []
            spec = parts[2].strip() if len(parts) == 3 else ""
            if spec:
                for piece in spec.split(";"):
                    piece = piece.strip()
                    if not piece:
                        continue
                    try:
                        span, label = piece.split(":")
                        i, j = span.split("-")
                        links.append((int(i), int(j), label))
                    except ValueError:
                        raise ResourceError(
                            "SYNTAX_ERROR", f"bad link {piece!r}", path, lineno
                        ) from None
            else:
                links = list(serial_chain(len(tokens)))
            term = TermRecord(tokens, head, tuple(links))
            _validate_term(term, path, lineno)
            terms.append(term)
    return TermIndex(terms)


# --- simplification ----------------------------------------------------------

@dataclass(frozen=True)
class Substitution:
    start: int            # original token index of the span start
    length: int           # span length in original tokens
    term: TermRecord
    replacement_index: int  # position of the head token in the simplified list


@dataclass
class Simplification:
    original_tokens: list
    simplified_tokens: list
    substitutions: list

    @property
    def removed(self):
        return sum(s.length - 1 for s in self.substitutions)


def simplify(tokens, term_index: TermIndex) -> Simplification:
    """Non-overlapping leftmost-longest term matching; each matched span is
    replaced by its head token marked TERM_HEAD."""
    lowered = [t.surface.lower() for t in tokens]
    out = []
    subs = []
    i = 0
    while i < len(tokens):
        term = term_index.match_at(lowered, i) if term_index is not None else None
        if term:
            head_tok = tokens[i + term.head_index]
            span = (tokens[i].source_span[0], tokens[i + len(term) - 1].source_span[1])
            original = " ".join(t.restored() for t in tokens[i : i + len(term)])
            out.append(
                Token(head_tok.surface, TokenKind.TERM_HEAD, span, original, term)
            )
            subs.append(Substitution(i, len(term), term, len(out) - 1))
            i += len(term)
        else:
            out.append(tokens[i])
            i += 1
    return Simplification(list(tokens), out, subs)


def reexpand(linkage: Linkage, simp: Simplification) -> Linkage:
    """Map a linkage over the simplified tokens back onto the original
    token sequence, splicing each term's internal analysis in at its
    original position.  Raises REEXPANSION_CONFLICT when an inserted
    internal link would cross or duplicate an outer link."""
    offsets = []
    pos = 0
    by_replacement = {s.replacement_index: s for s in simp.substitutions}
    for idx in range(len(simp.simplified_tokens)):
        sub = by_replacement.get(idx)
        if sub:
            offsets.append(sub.start + sub.term.head_index)
            pos = sub.start + sub.length
        else:
            offsets.append(pos)
            pos += 1
    links = [Link(offsets[l.left], offsets[l.right], l.label) for l in linkage.links]
    for sub in simp.substitutions:
        for i, j, label in sub.term.internal_links:
            links.append(Link(sub.start + i, sub.start + j, label))
    links.sort()
    pairs = {(l.left, l.right) for l in links}
    if len(pairs) != len(links):
        raise ReexpansionConflict(
            f"duplicate link pair after re-expansion: {sorted(pairs)}"
        )
    for i in range(len(links)):
        for j in range(i + 1, len(links)):
            if crossing(links[i], links[j]):
                raise ReexpansionConflict(
                    f"crossing links after re-expansion: {links[i]} / {links[j]}"
                )
    return Linkage(tuple(links), None, linkage.cost)
