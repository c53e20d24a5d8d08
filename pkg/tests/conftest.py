import random

import pytest

from sublang.engine import _compile_entry
from sublang.errors import AmbiguousMultiError
from sublang.grammar import (
    AndNode,
    Connector,
    ConnectorNode,
    CostedNode,
    Direction,
    Lexicon,
    LexiconEntry,
    OptionalNode,
    Origin,
    OrNode,
    expand_disjuncts,
)

LABELS = ["A", "B", "C", "S"]
SUBSCRIPTS = ["", "", "", "a", "b", "*a", "s"]


def random_connector(rng):
    return Connector(
        label=rng.choice(LABELS),
        subscript=rng.choice(SUBSCRIPTS),
        direction=rng.choice([Direction.LEFT, Direction.RIGHT]),
        multi=rng.random() < 0.12,
    )


def random_expression(rng, depth=0):
    roll = rng.random()
    if depth >= 2 or roll < 0.40:
        return ConnectorNode(random_connector(rng))
    if roll < 0.62:
        return AndNode(tuple(random_expression(rng, depth + 1) for _ in range(rng.randint(2, 3))))
    if roll < 0.82:
        return OrNode(tuple(random_expression(rng, depth + 1) for _ in range(rng.randint(2, 3))))
    if roll < 0.93:
        return OptionalNode(random_expression(rng, depth + 1))
    return CostedNode(random_expression(rng, depth + 1), 1)


def random_toy_lexicon(rng, n_words=3, max_disjuncts=10):
    """A small random lexicon that the engine accepts (no ambiguous multi
    pairs, bounded disjunct counts)."""
    words = [f"w{i}" for i in range(n_words)]
    for _attempt in range(200):
        entries = {}
        ok = True
        for w in words:
            per_word = []
            for k in range(rng.randint(1, 2)):
                expr = random_expression(rng)
                if len(expand_disjuncts(expr)) > max_disjuncts:
                    ok = False
                    break
                per_word.append(LexiconEntry(w, f"c{k}", expr, Origin.BASE))
            if not ok:
                break
            entries[w] = per_word
        if not ok:
            continue
        lex = Lexicon(entries, {})
        try:
            for word_entries in entries.values():
                for e in word_entries:
                    _compile_entry(e)
        except AmbiguousMultiError:
            continue
        return lex, words
    raise RuntimeError("could not generate a toy lexicon")


@pytest.fixture
def rng():
    return random.Random(20240517)
