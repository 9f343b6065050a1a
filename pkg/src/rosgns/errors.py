"""Exception types shared across the package."""


class RosgnsError(Exception):
    """Base class for all package errors."""


class ContractError(RosgnsError, ValueError):
    """An argument violates a documented precondition (shapes, signs, ranges)."""


class DegenerateCorpusError(RosgnsError, ValueError):
    """The corpus statistics are empty (no word-context pairs)."""


class FormatError(RosgnsError, ValueError):
    """A file does not follow the expected on-disk layout."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = []
        if source is not None:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class TokenNotFoundError(RosgnsError, KeyError):
    """A query token is not in the vocabulary."""

    def __init__(self, token, suggestions=()):
        self.token = token
        self.suggestions = list(suggestions)
        msg = f"{token!r} is not in the vocabulary"
        if self.suggestions:
            msg += "; closest matches: " + ", ".join(self.suggestions)
        super().__init__(msg)

    def __str__(self):
        return self.args[0]


class UndefinedCorrelationError(RosgnsError, ValueError):
    """Spearman correlation is undefined (too few points or constant ranks)."""

    def __init__(self, message, pairs_used=None, pairs_total=None):
        self.pairs_used = pairs_used
        self.pairs_total = pairs_total
        super().__init__(message)


class NumericalAbort(RosgnsError, FloatingPointError):
    """Training produced a non-finite objective."""

    def __init__(self, message, iteration=None):
        self.iteration = iteration
        super().__init__(message)
