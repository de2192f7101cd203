"""Exception types shared across the toolkit."""


class GlueprintError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(GlueprintError):
    """Operands have incompatible ranks or shapes."""


class PreconditionError(GlueprintError):
    """A documented precondition of an operation is violated."""


class UnsupportedError(GlueprintError):
    """Input lies outside the supported regime (e.g. zero forms)."""


class InvalidSlopeError(GlueprintError):
    """A slope vector is not primitive."""


class FormulaInapplicableError(GlueprintError):
    """A closed formula does not apply to the given data (e.g. e = 0)."""


class ValidationError(GlueprintError):
    """A document or datum fails validation.

    Carries the exact field paths of the offending entries.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class ResourceCapError(GlueprintError):
    """An enumeration would exceed the configured cell cap."""

    def __init__(self, cap, cells):
        self.cap = cap
        self.cells = cells
        super().__init__(f"sweep of {cells} cells exceeds the configured cap of {cap}")
