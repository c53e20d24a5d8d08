"""Grammar core: connectors, expressions, disjuncts and dictionary files.

A dictionary maps surface forms to connector expressions.  The text format
is line-oriented UTF-8::

    % comment to end of line
    <macro-name>: {D-} & S+;
    the.d: D+;
    cat.n: <macro-name> & O-;

``&`` binds tighter than ``or``; ``{e}`` marks an optional sub-expression,
``[e]`` adds one cost point, ``(e)`` groups.  A connector is ``@?LABEL
subscript? (+|-)`` where LABEL is uppercase ASCII, the subscript is
lowercase ASCII with ``*`` as a positional wildcard, ``@`` marks a
multi-connector and the sign gives the link direction.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .errors import dangling_macro, duplicate_entry, syntax_error


class Direction(enum.Enum):
    LEFT = "-"
    RIGHT = "+"


class Origin(enum.Enum):
    BASE = "base"
    OVERLAY = "overlay"
    MORPHO_GUESS = "morpho-guess"
    UNKNOWN_FALLBACK = "unknown-fallback"


@dataclass(frozen=True)
class Connector:
    label: str
    subscript: str
    direction: Direction
    multi: bool = False

    def __post_init__(self):
        if not self.label or not all("A" <= ch <= "Z" for ch in self.label):
            raise ValueError(f"connector label must be uppercase ASCII: {self.label!r}")
        if not all(ch == "*" or "a" <= ch <= "z" for ch in self.subscript):
            raise ValueError(f"connector subscript must be lowercase or '*': {self.subscript!r}")

    def __str__(self):
        return ("@" if self.multi else "") + self.label + self.subscript + self.direction.value


def connector_match(right: Connector, left: Connector) -> bool:
    """True iff a right-pointing connector can pair with a left-pointing one.

    Base labels must be equal; subscripts must agree at every position where
    both specify a character, with ``*`` and missing positions matching
    anything.  Independent of ``multi`` and of any cost.
    """
    if right.direction is not Direction.RIGHT or left.direction is not Direction.LEFT:
        raise ValueError("connector_match expects (right, left) directions")
    if right.label != left.label:
        return False
    for a, b in zip(right.subscript, left.subscript):
        if a != "*" and b != "*" and a != b:
            return False
    return True


def resolve_label(right: Connector, left: Connector) -> str:
    """Link label for a matched pair: base label plus the merged subscript."""
    a, b = right.subscript, left.subscript
    merged = []
    for i in range(max(len(a), len(b))):
        ca = a[i] if i < len(a) else "*"
        cb = b[i] if i < len(b) else "*"
        merged.append(cb if ca == "*" else ca)
    sub = "".join(merged).rstrip("*")
    return right.label + sub


# --- expression tree -------------------------------------------------------

@dataclass(frozen=True)
class ConnectorNode:
    connector: Connector


@dataclass(frozen=True)
class AndNode:
    children: tuple


@dataclass(frozen=True)
class OrNode:
    children: tuple


@dataclass(frozen=True)
class OptionalNode:
    child: object


@dataclass(frozen=True)
class CostedNode:
    child: object
    cost: int = 1


Expression = object  # any of the node classes above


@dataclass(frozen=True)
class Disjunct:
    """One concrete connection requirement: ordered left and right connector
    lists (nearest word first on both sides) and a cost."""

    left: tuple
    right: tuple
    cost: int = 0

    def __str__(self):
        l = " ".join(str(c) for c in self.left) or "()"
        r = " ".join(str(c) for c in self.right) or "()"
        return f"[{l} | {r} | cost {self.cost}]"


def expand_disjuncts(expression: Expression) -> list:
    """Expand an expression into the exact set of disjuncts it denotes.

    OR multiplies alternatives, OPTIONAL adds the empty alternative, AND
    concatenates preserving textual order, COSTED adds its cost to every
    disjunct of its child.  Duplicates are removed, first occurrence wins.
    """

    def walk(node):
        if isinstance(node, ConnectorNode):
            return [((node.connector,), 0)]
        if isinstance(node, AndNode):
            combos = [((), 0)]
            for child in node.children:
                expanded = walk(child)
                combos = [(seq + s2, c + c2) for seq, c in combos for s2, c2 in expanded]
            return combos
        if isinstance(node, OrNode):
            out = []
            for child in node.children:
                out.extend(walk(child))
            return out
        if isinstance(node, OptionalNode):
            return walk(node.child) + [((), 0)]
        if isinstance(node, CostedNode):
            return [(seq, c + node.cost) for seq, c in walk(node.child)]
        raise TypeError(f"not an expression node: {node!r}")

    seen = set()
    result = []
    for seq, cost in walk(expression):
        left = tuple(c for c in seq if c.direction is Direction.LEFT)
        right = tuple(c for c in seq if c.direction is Direction.RIGHT)
        d = Disjunct(left, right, cost)
        key = (left, right, cost)
        if key not in seen:
            seen.add(key)
            result.append(d)
    return result


# --- lexicon ---------------------------------------------------------------

@dataclass(frozen=True)
class LexiconEntry:
    word: str
    category: str
    expression: Expression
    origin: Origin

    def __str__(self):
        return f"{self.word}.{self.category} ({self.origin.value})"


class Lexicon:
    """Immutable after loading; resolution returns overlay entries first.

    An overlay shadows the base per surface form: if a word occurs in the
    overlay, only its overlay entries are visible.
    """

    def __init__(self, entries, class_macros):
        self._entries = dict(entries)
        self.class_macros = dict(class_macros)

    def words(self):
        return sorted(self._entries)

    def resolve(self, word: str) -> list:
        """Entries for a surface form.  A sentence-initial capitalised form
        falls back to its lowercase spelling when the exact form is absent."""
        hit = self._entries.get(word)
        if hit:
            return list(hit)
        if word and word[0].isupper():
            hit = self._entries.get(word[0].lower() + word[1:])
            if hit:
                return list(hit)
        return []

    def __contains__(self, word):
        return bool(self.resolve(word))

    def structurally_equal(self, other: "Lexicon") -> bool:
        return (
            self._entries == other._entries and self.class_macros == other.class_macros
        )

    def serialize(self) -> str:
        """Dictionary-format text that reloads to a structurally equal lexicon."""
        lines = []
        for name in sorted(self.class_macros):
            lines.append(f"<{name}>: {unparse_expression(self.class_macros[name])};")
        for word in sorted(self._entries):
            for entry in self._entries[word]:
                head = word if entry.category == "any" else f"{word}.{entry.category}"
                lines.append(f"{head}: {unparse_expression(entry.expression)};")
        return "\n".join(lines) + "\n"


def unparse_expression(node) -> str:
    if isinstance(node, ConnectorNode):
        return str(node.connector)
    if isinstance(node, AndNode):
        return " & ".join(_unparse_tight(c) for c in node.children)
    if isinstance(node, OrNode):
        return " or ".join(
            f"({_unparse_tight(c)})" if isinstance(c, OrNode) else _unparse_tight(c)
            for c in node.children
        )
    if isinstance(node, OptionalNode):
        return "{" + unparse_expression(node.child) + "}"
    if isinstance(node, CostedNode):
        inner = unparse_expression(node.child)
        for _ in range(node.cost - 1):
            inner = "[" + inner + "]"
        return "[" + inner + "]"
    raise TypeError(f"not an expression node: {node!r}")


def _unparse_tight(node) -> str:
    # parenthesise OR under AND ("&" binds tighter)
    if isinstance(node, OrNode):
        return "(" + unparse_expression(node) + ")"
    return unparse_expression(node)


def _flat_and(children):
    flat = []
    for c in children:
        flat.extend(c.children) if isinstance(c, AndNode) else flat.append(c)
    return flat[0] if len(flat) == 1 else AndNode(tuple(flat))


def _flat_or(children):
    flat = []
    for c in children:
        flat.extend(c.children) if isinstance(c, OrNode) else flat.append(c)
    return flat[0] if len(flat) == 1 else OrNode(tuple(flat))


# --- dictionary text parsing -----------------------------------------------

_CONNECTOR_RE = re.compile(r"^@?[A-Z]+[a-z*]*$")


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _scan(text, path=None):
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)

    def err(msg, l=None, c=None):
        raise syntax_error(msg, path, l if l is not None else line, c if c is not None else col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in ":;&(){}[]":
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch == "<":
            j = text.find(">", i)
            if j < 0 or "\n" in text[i:j]:
                err("unterminated macro name")
            name = text[i + 1 : j]
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9-]*", name):
                err(f"bad macro name <{name}>")
            tokens.append(_Token("MACRO", name, line, col))
            col += j - i + 1
            i = j + 1
            continue
        m = re.match(r"@?[A-Za-z0-9_'*]+", text[i:])
        if not m:
            err(f"unexpected character {ch!r}")
        run = m.group(0)
        start_col = col
        i += len(run)
        col += len(run)
        # connector: uppercase run with optional subscript, a trailing sign,
        # and the sign not glued to a following word character
        if _CONNECTOR_RE.fullmatch(run) and i < n and text[i] in "+-":
            sign = text[i]
            nxt = text[i + 1] if i + 1 < n else ""
            if not (sign == "-" and (nxt.isalnum() or nxt in "_'")):
                tokens.append(_Token("CONNECTOR", run + sign, line, start_col))
                i += 1
                col += 1
                continue
        if run.startswith("@"):
            err(f"'@' is only valid on a connector: {run!r}", line, start_col)
        # word, possibly hyphenated and with a dotted category suffix
        word = run
        while i < n and text[i] == "-" and i + 1 < n and (text[i + 1].isalnum() or text[i + 1] in "_'"):
            m = re.match(r"[A-Za-z0-9_']+", text[i + 1 :])
            word += "-" + m.group(0)
            i += 1 + len(m.group(0))
            col += 1 + len(m.group(0))
        category = None
        if i < n and text[i] == "." and i + 1 < n and text[i + 1].islower():
            m = re.match(r"[a-z]+", text[i + 1 :])
            category = m.group(0)
            i += 1 + len(category)
            col += 1 + len(category)
        tokens.append(_Token("WORD", word, line, start_col))
        if category is not None:
            tokens.append(_Token("CATEGORY", category, line, start_col))
    return tokens


def _parse_connector(text):
    multi = text.startswith("@")
    body, sign = text.lstrip("@")[:-1], text[-1]
    m = re.match(r"[A-Z]+", body)
    label, subscript = m.group(0), body[m.end():]
    return Connector(label, subscript, Direction(sign), multi)


class _Parser:
    def __init__(self, tokens, path=None):
        self.tokens = tokens
        self.pos = 0
        self.path = path

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self):
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            raise syntax_error(
                "unexpected end of file",
                self.path,
                last.line if last else 1,
                last.col if last else 1,
            )
        self.pos += 1
        return tok

    def _expect(self, kind):
        tok = self._next()
        if tok.kind != kind:
            raise syntax_error(f"expected {kind!r}, got {tok.text!r}", self.path, tok.line, tok.col)
        return tok

    def statements(self):
        """Yield (head_token, category_or_None, expression) triples."""
        out = []
        while self._peek() is not None:
            head = self._next()
            if head.kind not in ("WORD", "MACRO"):
                raise syntax_error(
                    f"expected a word or macro definition, got {head.text!r}",
                    self.path, head.line, head.col,
                )
            category = None
            if head.kind == "WORD" and self._peek() is not None and self._peek().kind == "CATEGORY":
                category = self._next().text
            self._expect(":")
            expr = self._expression()
            self._expect(";")
            out.append((head, category, expr))
        return out

    def _expression(self):
        alts = [self._and_expression()]
        while True:
            tok = self._peek()
            if tok is not None and tok.kind == "WORD" and tok.text == "or":
                self._next()
                alts.append(self._and_expression())
            else:
                break
        return alts[0] if len(alts) == 1 else _flat_or(alts)

    def _and_expression(self):
        terms = [self._term()]
        while self._peek() is not None and self._peek().kind == "&":
            self._next()
            terms.append(self._term())
        return terms[0] if len(terms) == 1 else _flat_and(terms)

    def _term(self):
        tok = self._next()
        if tok.kind == "CONNECTOR":
            return ConnectorNode(_parse_connector(tok.text))
        if tok.kind == "MACRO":
            return _MacroRef(tok.text, tok.line)
        if tok.kind == "(":
            expr = self._expression()
            self._expect(")")
            return expr
        if tok.kind == "{":
            expr = self._expression()
            self._expect("}")
            return OptionalNode(expr)
        if tok.kind == "[":
            expr = self._expression()
            self._expect("]")
            return CostedNode(expr, 1)
        raise syntax_error(f"unexpected {tok.text!r} in expression", self.path, tok.line, tok.col)


@dataclass(frozen=True)
class _MacroRef:
    name: str
    line: int = field(compare=False, default=0)


def _expand_macros(node, macros, path, stack=()):
    if isinstance(node, _MacroRef):
        if node.name in stack:
            raise syntax_error(
                f"macro <{node.name}> is defined in terms of itself", path, node.line
            )
        if node.name not in macros:
            raise dangling_macro(node.name, path, node.line)
        return _expand_macros(macros[node.name], macros, path, stack + (node.name,))
    if isinstance(node, AndNode):
        return _flat_and([_expand_macros(c, macros, path, stack) for c in node.children])
    if isinstance(node, OrNode):
        return _flat_or([_expand_macros(c, macros, path, stack) for c in node.children])
    if isinstance(node, OptionalNode):
        return OptionalNode(_expand_macros(node.child, macros, path, stack))
    if isinstance(node, CostedNode):
        return CostedNode(_expand_macros(node.child, macros, path, stack), node.cost)
    return node


def _load_statements(path, text, origin, base_macros=None):
    tokens = _scan(text, path)
    statements = _Parser(tokens, path).statements()
    raw_macros = dict(base_macros or {})
    for head, _category, expr in statements:
        if head.kind == "MACRO":
            raw_macros[head.text] = expr
    macros = {name: _expand_macros(e, raw_macros, path) for name, e in raw_macros.items()}

    entries = {}
    seen = set()
    for head, category, expr in statements:
        if head.kind != "WORD":
            continue
        word = head.text
        category = category or "any"
        if (word, category) in seen:
            raise duplicate_entry(word, category, path, head.line)
        seen.add((word, category))
        expression = _expand_macros(expr, macros, path)
        entries.setdefault(word, []).append(
            LexiconEntry(word, category, expression, origin)
        )
    return entries, macros


def load_dictionary(path) -> Lexicon:
    """Load a dictionary file into a Lexicon with all macros resolved."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    entries, macros = _load_statements(str(path), text, Origin.BASE)
    return Lexicon(entries, macros)


def load_dictionary_text(text, origin=Origin.BASE, path="<string>") -> Lexicon:
    entries, macros = _load_statements(path, text, origin)
    return Lexicon(entries, macros)


def apply_overlay(base: Lexicon, overlay_path) -> Lexicon:
    """New lexicon where overlay entries shadow base entries per surface form.

    The overlay may reference base macros; overlay macro definitions are
    visible to overlay entries and recorded in the result.
    """
    with open(overlay_path, encoding="utf-8") as fh:
        text = fh.read()
    return apply_overlay_text(base, text, path=str(overlay_path))


def apply_overlay_text(base: Lexicon, text, path="<overlay>") -> Lexicon:
    overlay_entries, macros = _load_statements(
        path, text, Origin.OVERLAY, base_macros=base.class_macros
    )
    merged = dict(base._entries)
    merged.update(overlay_entries)
    return Lexicon(merged, macros)
