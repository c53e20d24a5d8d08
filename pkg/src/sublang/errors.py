"""Exception types shared across the package.

Every error that corresponds to a named condition in a resource file
carries a short ``code`` string so callers (and the ``validate`` CLI
subcommand) can report conditions uniformly.
"""


class SublangError(Exception):
    """Base class for all package errors."""

    code = "ERROR"


class DictionaryError(SublangError):
    """A dictionary or overlay file could not be loaded."""

    def __init__(self, code, message, path=None, line=None, column=None):
        self.code = code
        self.path = path
        self.line = line
        self.column = column
        loc = ""
        if path is not None:
            loc = f"{path}:"
        if line is not None:
            loc += f"{line}:"
            if column is not None:
                loc += f"{column}:"
        super().__init__(f"{code}: {loc} {message}" if loc else f"{code}: {message}")


def syntax_error(message, path=None, line=None, column=None):
    return DictionaryError("SYNTAX_ERROR", message, path, line, column)


def dangling_macro(name, path=None, line=None):
    return DictionaryError("DANGLING_MACRO", f"macro <{name}> is not defined", path, line)


def duplicate_entry(word, category, path=None, line=None):
    return DictionaryError(
        "DUPLICATE_ENTRY", f"duplicate entry for {word}.{category}", path, line
    )


class AmbiguousMultiError(SublangError):
    """A disjunct declares two multi-connectors with the same base label on
    one side, which makes connector-to-link assignment ambiguous.  Rejected
    so that the linkage count equals the number of distinct linkages."""

    code = "AMBIGUOUS_MULTI"


class ParseTimeout(SublangError):
    """The per-sentence time budget was exceeded during counting."""

    code = "TIMEOUT"


class UnresolvableTokenError(SublangError):
    """A token has no disjuncts at all (no lexicon entry and no fallback)."""

    code = "UNRESOLVABLE_TOKEN"

    def __init__(self, index, surface):
        self.index = index
        self.surface = surface
        super().__init__(f"UNRESOLVABLE_TOKEN: token {index} ({surface!r}) has no disjuncts")


class ResourceError(SublangError):
    """A resource file (rules, entities, terms, gold, config) is malformed."""

    def __init__(self, code, message, path=None, line=None):
        self.code = code
        self.path = path
        self.line = line
        loc = f"{path}:{line}: " if path is not None and line is not None else (
            f"{path}: " if path is not None else ""
        )
        super().__init__(f"{code}: {loc}{message}")


class ReexpansionConflict(SublangError):
    """Inserting a term's internal links would break planarity/exclusion."""

    code = "REEXPANSION_CONFLICT"


class MissingBaselineError(SublangError):
    """Report aggregation requires the base configuration as ratio baseline."""

    code = "MISSING_BASELINE"
