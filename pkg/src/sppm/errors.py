"""Exception hierarchy shared by the solver modules."""


class SPPMError(Exception):
    """Base class for every error raised by this package."""


class OrderDimensionError(SPPMError, ValueError):
    """Two objective vectors of different length were compared."""


class EvaluationError(SPPMError, ArithmeticError):
    """An objective component produced a non-finite value.

    ``component`` is the zero-based index of the offending component, or
    ``None`` when the failure is not tied to a single component.
    """

    def __init__(self, message, component=None):
        super().__init__(message)
        self.component = component


class SelectionError(SPPMError):
    """A subgradient oracle has no selection rule at the requested point."""


class ConstructionError(SPPMError, ValueError):
    """A problem or model was built from invalid parameters."""


class ParameterError(SPPMError, ValueError):
    """Scalarization, solver or driver parameters violate their invariants."""


class MethodMismatchError(SPPMError, ValueError):
    """A criticality method was requested for a problem it cannot handle."""


class ExportError(SPPMError, OSError):
    """Writing or reading a run record failed."""
