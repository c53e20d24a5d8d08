"""Linkage counting and enumeration under link-grammar constraints.

A linkage over a token sequence is a set of typed links such that

* PLANARITY: links drawn above the sentence never cross,
* CONNECTIVITY: every token is reachable from every other through links,
* EXCLUSION: at most one link joins a given token pair,
* SATISFACTION: each token uses exactly one disjunct of one of its lexicon
  entries; non-multi connectors are used exactly once, multi connectors one
  or more times, nearest-word-first in listing order on each side.

Counting uses a memoised recursion over spans.  Each span is bounded by two
words whose unconsumed connector lists point into it; the farthest pending
connector of the left boundary determines where the span splits.  The
brute-force oracle in the test suite defines correctness; the recursion is
just the fast way to agree with it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import NamedTuple

from .errors import AmbiguousMultiError, ParseTimeout, UnresolvableTokenError
from .grammar import (
    Connector,
    Direction,
    Disjunct,
    LexiconEntry,
    connector_match,
    expand_disjuncts,
    resolve_label,
)


class Link(NamedTuple):
    left: int
    right: int
    label: str


@dataclass(frozen=True)
class Linkage:
    links: tuple            # sorted Link tuples
    disjunct_choice: tuple  # one (LexiconEntry, Disjunct) per token
    cost: int               # sum of chosen disjunct costs

    def total_length(self) -> int:
        return sum(l.right - l.left for l in self.links)

    def sort_key(self):
        choice_ids = tuple(
            (e.word, e.category, d.cost, tuple(map(str, d.left)), tuple(map(str, d.right)))
            for e, d in self.disjunct_choice
        )
        return (self.cost, self.total_length(), self.links, choice_ids)


@dataclass
class ParseResult:
    tokens: list
    linkage_count: int
    linkages: list
    parse_time_seconds: float
    complete: bool
    timed_out: bool = False
    ranking_exact: bool = True

    def best(self):
        return self.linkages[0] if self.linkages else None

    def to_json_dict(self):
        best = self.best()
        return {
            "tokens": list(self.tokens),
            "linkageCount": self.linkage_count,
            "parseTimeSeconds": self.parse_time_seconds,
            "complete": self.complete,
            "timedOut": self.timed_out,
            "bestLinkage": [[l.left, l.right, l.label] for l in best.links] if best else None,
        }


# --- candidate compilation ---------------------------------------------------

@dataclass(frozen=True)
class _Cand:
    """A disjunct compiled for the span recursion: connector tuples stored
    farthest-word-first (reverse of the listing order)."""

    entry: LexiconEntry
    disjunct: Disjunct
    left: tuple
    right: tuple


def _collapse_runs(side):
    """Replace each run of identical connectors containing a multi by
    (len-1) plain copies plus one trailing multi; the match semantics are
    unchanged but the connector-to-link assignment becomes unique."""
    out = []
    i = 0
    while i < len(side):
        j = i
        c = side[i]
        while j < len(side) and (
            side[j].label == c.label
            and side[j].subscript == c.subscript
            and side[j].direction == c.direction
        ):
            j += 1
        run = side[i:j]
        if len(run) > 1 and any(x.multi for x in run):
            plain = Connector(c.label, c.subscript, c.direction, False)
            out.extend([plain] * (len(run) - 1))
            out.append(Connector(c.label, c.subscript, c.direction, True))
        else:
            out.extend(run)
        i = j
    return tuple(out)


def _check_multi_ambiguity(side, entry):
    seen = set()
    for c in side:
        if c.multi:
            if c.label in seen:
                raise AmbiguousMultiError(
                    f"entry {entry}: two multi-connectors with base label "
                    f"{c.label!r} on one side make linkage identity ambiguous"
                )
            seen.add(c.label)


_compile_cache = {}


def _compile_entry(entry: LexiconEntry):
    cached = _compile_cache.get(entry)
    if cached is not None:
        return cached
    cands = []
    for d in expand_disjuncts(entry.expression):
        left = _collapse_runs(tuple(reversed(d.left)))
        right = _collapse_runs(tuple(reversed(d.right)))
        _check_multi_ambiguity(left, entry)
        _check_multi_ambiguity(right, entry)
        cands.append(_Cand(entry, d, left, right))
    _compile_cache[entry] = cands
    return cands


def build_candidates(tokens, lexicon):
    """Per-token compiled disjunct lists.  ``lexicon`` needs only a
    ``resolve(word) -> [LexiconEntry]`` method, so a morpho-guessing wrapper
    works as well as a plain Lexicon."""
    surfaces = [t if isinstance(t, str) else t.surface for t in tokens]
    n = len(surfaces)
    candidates = []
    for i, surface in enumerate(surfaces):
        entries = lexicon.resolve(surface)
        all_cands = [cand for entry in entries for cand in _compile_entry(entry)]
        if not all_cands:
            raise UnresolvableTokenError(i, surface)
        # a side needs at least one word per required connector; a token whose
        # disjuncts are all geometrically impossible keeps an empty list and
        # the sentence counts zero linkages (it is still resolvable)
        candidates.append(
            [c for c in all_cands if len(c.left) <= i and len(c.right) <= n - 1 - i]
        )
    return surfaces, candidates


# --- span recursion ----------------------------------------------------------

class _Timeout(Exception):
    pass


_DONE = ((), 0)


def _done(state):
    side, pos = state
    return pos == len(side)


def _cur(state):
    side, pos = state
    return side[pos]


def _succs(state):
    side, pos = state
    out = [(side, pos + 1)]
    if side[pos].multi:
        out.append(state)
    return out


class _ParseContext:
    def __init__(self, candidates, deadline=None):
        self.cands = candidates
        self.deadline = deadline
        self._count_memo = {}
        self._conn_memo = {}
        self._ticks = 0

    def _tick(self):
        self._ticks += 1
        if self.deadline is not None and self._ticks % 256 == 0:
            if time.monotonic() > self.deadline:
                raise _Timeout()

    # number of ways to complete the open span (lw, rw): all words strictly
    # inside are fully linked within it, `le` (right-pointing list of lw) and
    # `re` (left-pointing list of rw) are consumed inside, and every inner
    # word connects to lw or rw.
    def count_span(self, lw, rw, le, re):
        key = (lw, rw, le, re)
        hit = self._count_memo.get(key)
        if hit is not None:
            return hit
        self._tick()
        if rw == lw + 1:
            total = 1 if _done(le) and _done(re) else 0
            self._count_memo[key] = total
            return total
        total = 0
        if not _done(le):
            lc = _cur(le)
            for w in range(lw + 1, rw):
                for d in self.cands[w]:
                    if not d.left or not connector_match(lc, d.left[0]):
                        continue
                    inner = 0
                    for le2 in _succs(le):
                        for dl2 in _succs((d.left, 0)):
                            inner += self.count_span(lw, w, le2, dl2)
                    if not inner:
                        continue
                    # w linked to lw only
                    total += inner * self.count_span(w, rw, (d.right, 0), re)
                    # w linked to both lw and rw
                    if not _done(re) and d.right and connector_match(d.right[0], _cur(re)):
                        both = 0
                        for dr2 in _succs((d.right, 0)):
                            for re2 in _succs(re):
                                both += self.count_span(w, rw, dr2, re2)
                        total += inner * both
        elif not _done(re):
            rc = _cur(re)
            for w in range(lw + 1, rw):
                for d in self.cands[w]:
                    if not d.right or not connector_match(d.right[0], rc):
                        continue
                    right = 0
                    for dr2 in _succs((d.right, 0)):
                        for re2 in _succs(re):
                            right += self.count_span(w, rw, dr2, re2)
                    if not right:
                        continue
                    total += right * self.count_span(lw, w, _DONE, (d.left, 0))
        self._count_memo[key] = total
        return total

    # like count_span but additionally requires lw and rw to end up in one
    # connected component; used along the top-level spine of the sentence.
    def count_connected(self, lw, rw, le, re):
        key = (lw, rw, le, re)
        hit = self._conn_memo.get(key)
        if hit is not None:
            return hit
        self._tick()
        total = 0
        if not _done(le):
            lc = _cur(le)
            if not _done(re) and connector_match(lc, _cur(re)):
                for le2 in _succs(le):
                    for re2 in _succs(re):
                        total += self.count_span(lw, rw, le2, re2)
            for w in range(lw + 1, rw):
                for d in self.cands[w]:
                    if not d.left or not connector_match(lc, d.left[0]):
                        continue
                    inner = 0
                    for le2 in _succs(le):
                        for dl2 in _succs((d.left, 0)):
                            inner += self.count_span(lw, w, le2, dl2)
                    if inner:
                        total += inner * self.count_connected(w, rw, (d.right, 0), re)
        self._conn_memo[key] = total
        return total

    def total_count(self):
        n = len(self.cands)
        if n == 0:
            return 0
        if n == 1:
            return sum(1 for d in self.cands[0] if not d.left and not d.right)
        total = 0
        for d0 in self.cands[0]:
            if d0.left:
                continue
            for dn in self.cands[n - 1]:
                if dn.right:
                    continue
                total += self.count_connected(0, n - 1, (d0.right, 0), (dn.left, 0))
        return total

    # --- enumeration (mirrors the two counting recursions) ------------------

    def enum_span(self, lw, rw, le, re):
        if self.count_span(lw, rw, le, re) == 0:
            return []
        self._tick()
        if rw == lw + 1:
            return [((), ())]
        out = []
        if not _done(le):
            lc = _cur(le)
            for w in range(lw + 1, rw):
                for d in self.cands[w]:
                    if not d.left or not connector_match(lc, d.left[0]):
                        continue
                    link = Link(lw, w, resolve_label(lc, d.left[0]))
                    inner = []
                    for le2 in _succs(le):
                        for dl2 in _succs((d.left, 0)):
                            inner.extend(self.enum_span(lw, w, le2, dl2))
                    if not inner:
                        continue
                    choice = ((w, d),)
                    for rpart in self.enum_span(w, rw, (d.right, 0), re):
                        for lpart in inner:
                            out.append(
                                (lpart[0] + (link,) + rpart[0], lpart[1] + choice + rpart[1])
                            )
                    if not _done(re) and d.right and connector_match(d.right[0], _cur(re)):
                        rlink = Link(w, rw, resolve_label(d.right[0], _cur(re)))
                        both = []
                        for dr2 in _succs((d.right, 0)):
                            for re2 in _succs(re):
                                both.extend(self.enum_span(w, rw, dr2, re2))
                        for rpart in both:
                            for lpart in inner:
                                out.append(
                                    (
                                        lpart[0] + (link, rlink) + rpart[0],
                                        lpart[1] + choice + rpart[1],
                                    )
                                )
        elif not _done(re):
            rc = _cur(re)
            for w in range(lw + 1, rw):
                for d in self.cands[w]:
                    if not d.right or not connector_match(d.right[0], rc):
                        continue
                    rlink = Link(w, rw, resolve_label(d.right[0], rc))
                    right = []
                    for dr2 in _succs((d.right, 0)):
                        for re2 in _succs(re):
                            right.extend(self.enum_span(w, rw, dr2, re2))
                    if not right:
                        continue
                    choice = ((w, d),)
                    for lpart in self.enum_span(lw, w, _DONE, (d.left, 0)):
                        for rpart in right:
                            out.append(
                                (lpart[0] + (rlink,) + rpart[0], lpart[1] + choice + rpart[1])
                            )
        return out

    def enum_connected(self, lw, rw, le, re):
        if self.count_connected(lw, rw, le, re) == 0:
            return []
        self._tick()
        out = []
        if not _done(le):
            lc = _cur(le)
            if not _done(re) and connector_match(lc, _cur(re)):
                link = Link(lw, rw, resolve_label(lc, _cur(re)))
                for le2 in _succs(le):
                    for re2 in _succs(re):
                        for part in self.enum_span(lw, rw, le2, re2):
                            out.append(((link,) + part[0], part[1]))
            for w in range(lw + 1, rw):
                for d in self.cands[w]:
                    if not d.left or not connector_match(lc, d.left[0]):
                        continue
                    link = Link(lw, w, resolve_label(lc, d.left[0]))
                    inner = []
                    for le2 in _succs(le):
                        for dl2 in _succs((d.left, 0)):
                            inner.extend(self.enum_span(lw, w, le2, dl2))
                    if not inner:
                        continue
                    choice = ((w, d),)
                    for rpart in self.enum_connected(w, rw, (d.right, 0), re):
                        for lpart in inner:
                            out.append(
                                (lpart[0] + (link,) + rpart[0], lpart[1] + choice + rpart[1])
                            )
        return out

    def enumerate_all(self):
        n = len(self.cands)
        results = []
        if n == 0:
            return results
        if n == 1:
            for d in self.cands[0]:
                if not d.left and not d.right:
                    results.append(((), ((0, d),)))
            return results
        for d0 in self.cands[0]:
            if d0.left:
                continue
            for dn in self.cands[n - 1]:
                if dn.right:
                    continue
                spine = self.enum_connected(0, n - 1, (d0.right, 0), (dn.left, 0))
                for links, choices in spine:
                    results.append((links, ((0, d0),) + choices + ((n - 1, dn),)))
        return results


# --- public operations -------------------------------------------------------

DEFAULT_CAP = 1000
DEFAULT_TIMEOUT = 30.0
ENUMERATION_BUDGET = 50_000


def count_linkages(tokens, lexicon, timeout=None) -> int:
    """Exact number of distinct valid linkages (links plus disjunct choice).

    With a timeout, exceeding the budget raises ParseTimeout (counting has
    no partial result to flag, unlike enumerate_linkages)."""
    surfaces, candidates = build_candidates(tokens, lexicon)
    deadline = time.monotonic() + timeout if timeout else None
    try:
        if deadline is not None and time.monotonic() > deadline:
            raise _Timeout()
        return _ParseContext(candidates, deadline).total_count()
    except _Timeout:
        raise ParseTimeout(f"count_linkages exceeded {timeout}s") from None


def enumerate_linkages(
    tokens, lexicon, cap=DEFAULT_CAP, timeout=DEFAULT_TIMEOUT, budget=ENUMERATION_BUDGET
) -> ParseResult:
    """Count and materialise linkages, ranked ascending by
    (cost, total link length, link list, disjunct choice).

    At most ``cap`` linkages are kept.  When the exact count exceeds
    ``budget`` the ranking is computed over the first ``budget`` linkages in
    deterministic enumeration order and flagged as inexact.  A timeout
    yields an incomplete result (CLF false, count zero) with a flag.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    start = time.monotonic()
    deadline = start + timeout if timeout else None
    surfaces, candidates = build_candidates(tokens, lexicon)
    ctx = _ParseContext(candidates, deadline)
    try:
        if deadline is not None and time.monotonic() > deadline:
            raise _Timeout()
        total = ctx.total_count()
        raw = ctx.enumerate_all() if total <= budget else _bounded_enumerate(ctx, budget)
    except _Timeout:
        return ParseResult(
            tokens=list(surfaces),
            linkage_count=0,
            linkages=[],
            parse_time_seconds=time.monotonic() - start,
            complete=False,
            timed_out=True,
        )
    linkages = []
    for links, choices in raw:
        per_token = tuple(
            (cand.entry, cand.disjunct) for _, cand in sorted(choices, key=lambda x: x[0])
        )
        cost = sum(d.cost for _, d in per_token)
        linkages.append(Linkage(tuple(sorted(links)), per_token, cost))
    linkages.sort(key=Linkage.sort_key)
    return ParseResult(
        tokens=list(surfaces),
        linkage_count=total,
        linkages=linkages[:cap],
        parse_time_seconds=time.monotonic() - start,
        complete=total > 0,
        ranking_exact=total <= budget,
    )


def _bounded_enumerate(ctx, budget):
    # deterministic prefix of the full enumeration; used only above budget
    raw = ctx.enumerate_all()
    return raw[:budget]


# --- validation --------------------------------------------------------------

def _label_parts(label):
    i = 0
    while i < len(label) and label[i].isupper():
        i += 1
    return label[:i], label[i:]


def _label_consistent(connector: Connector, label: str) -> bool:
    base, sub = _label_parts(label)
    if base != connector.label:
        return False
    for i, ch in enumerate(connector.subscript):
        if ch != "*":
            if i >= len(sub) or sub[i] != ch:
                return False
    return True


def _side_satisfied(connectors, labels):
    """Order-preserving assignment of link labels (nearest first) to a
    nearest-first connector list; multi connectors absorb 1+ consecutive
    links, others exactly one."""

    def ok(ci, li):
        if ci == len(connectors):
            return li == len(labels)
        c = connectors[ci]
        if li >= len(labels) or not _label_consistent(c, labels[li]):
            return False
        if not c.multi:
            return ok(ci + 1, li + 1)
        j = li + 1
        while True:
            if ok(ci + 1, j):
                return True
            if j < len(labels) and _label_consistent(c, labels[j]):
                j += 1
            else:
                return False

    return ok(0, 0)


def crossing(a: Link, b: Link) -> bool:
    if a.left > b.left or (a.left == b.left and a.right > b.right):
        a, b = b, a
    return a.left < b.left < a.right < b.right


def validate_linkage(tokens, lexicon, linkage: Linkage) -> bool:
    """True iff planarity, connectivity, exclusion and satisfaction all hold
    and the chosen entries/disjuncts come from the given lexicon.

    A linkage without disjunct choices (a re-expanded one, where the term's
    internal links have no lexicon origin) is checked structurally."""
    surfaces = [t if isinstance(t, str) else t.surface for t in tokens]
    n = len(surfaces)
    links = list(linkage.links)
    for l in links:
        if not (0 <= l.left < l.right < n):
            return False
    if len({(l.left, l.right) for l in links}) != len(links):
        return False  # exclusion
    for i in range(len(links)):
        for j in range(i + 1, len(links)):
            if crossing(links[i], links[j]):
                return False  # planarity
    if n > 1:
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for l in links:
            parent[find(l.left)] = find(l.right)
        if len({find(i) for i in range(n)}) != 1:
            return False  # connectivity
    if linkage.disjunct_choice is None:
        return True
    if len(linkage.disjunct_choice) != n:
        return False
    for i, (entry, disjunct) in enumerate(linkage.disjunct_choice):
        entries = lexicon.resolve(surfaces[i])
        if entry not in entries:
            return False
        if disjunct not in expand_disjuncts(entry.expression):
            return False
        left_labels = [l.label for l in sorted(links, key=lambda l: -l.left) if l.right == i]
        right_labels = [l.label for l in sorted(links, key=lambda l: l.right) if l.left == i]
        if not _side_satisfied(disjunct.left, left_labels):
            return False
        if not _side_satisfied(disjunct.right, right_labels):
            return False
    return True


# --- diagram -----------------------------------------------------------------

def render_diagram(tokens, linkage: Linkage) -> str:
    """ASCII arc diagram of a linkage, links drawn above the words."""
    surfaces = [t if isinstance(t, str) else t.surface for t in tokens]
    if not surfaces:
        return ""
    centers = []
    pos = 0
    for s in surfaces:
        centers.append(pos + max(len(s) // 2, 0))
        pos += len(s) + 1
    width = pos - 1
    links = sorted(linkage.links, key=lambda l: (l.right - l.left, l.left))
    heights = {}
    for l in links:
        h = 1
        for other in links:
            if other == l:
                continue
            if l.left <= other.left and other.right <= l.right and other in heights:
                h = max(h, heights[other] + 1)
        heights[l] = h
    max_h = max(heights.values(), default=0)
    rows = [[" "] * width for _ in range(max_h)]
    for l, h in heights.items():
        row = rows[max_h - h]
        a, b = centers[l.left], centers[l.right]
        for x in range(a + 1, b):
            row[x] = "-"
        row[a] = "+"
        row[b] = "+"
        text = l.label
        mid = (a + b - len(text) + 1) // 2
        if a < mid and mid + len(text) <= b:
            for k, ch in enumerate(text):
                row[mid + k] = ch
        for lower in range(max_h - h + 1, max_h):
            for x in (a, b):
                if rows[lower][x] == " ":
                    rows[lower][x] = "|"
                elif rows[lower][x] == "-":
                    rows[lower][x] = "|"
    lines = ["".join(r).rstrip() for r in rows]
    lines.append(" ".join(surfaces))
    return "\n".join(lines)
