"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ValidationError -> 2,
ResourceBudgetError -> 3, and any AssertionError -> 4.
"""


class PdlabError(Exception):
    """Base class for all pdlab errors."""


class ValidationError(PdlabError):
    """A parameter or input violates a documented precondition."""


class ResourceBudgetError(PdlabError):
    """A computation would exceed a configured memory or size budget."""
