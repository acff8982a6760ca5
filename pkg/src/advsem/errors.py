"""Exception hierarchy shared across the toolkit."""


class AdvsemError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(AdvsemError, ValueError):
    """An input violated a documented contract."""


class RangeError(ValidationError):
    """A count or index fell outside its allowed range."""


class LoadError(AdvsemError):
    """A file required to load an artifact is missing or malformed."""


class UnknownLabelError(AdvsemError, KeyError):
    """A label is absent from the taxonomy's lemma index.

    Distinct from "not related": callers decide whether to fall back to an
    unrelated verdict, queue the label for human adjudication, or abort.
    """

    def __init__(self, label: str):
        super().__init__(label)
        self.label = label

    def __str__(self) -> str:  # KeyError quotes its arg, which reads badly
        return f"label not in taxonomy: {self.label!r}"


class DuplicateKeyError(ValidationError):
    """Two records share a key that must be unique."""


class CoverageError(AdvsemError):
    """A success-rate query found keys with no judgment at all."""

    def __init__(self, missing_keys):
        self.missing_keys = list(missing_keys)
        preview = ", ".join(map(str, self.missing_keys[:5]))
        more = "" if len(self.missing_keys) <= 5 else f" (+{len(self.missing_keys) - 5} more)"
        super().__init__(
            f"{len(self.missing_keys)} keys have no judgment: {preview}{more}"
        )


class AttackDivergedError(AdvsemError):
    """The attack optimizer produced a non-finite loss or gradient."""

    def __init__(self, iteration: int, what: str):
        self.iteration = iteration
        super().__init__(f"non-finite {what} at iteration {iteration}")
