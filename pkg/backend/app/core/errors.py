"""Exception hierarchy shared by the solver layers."""


class SolverError(Exception):
    """Base class for all solver errors."""


class SmtParseError(SolverError):
    """Input uses a construct outside the supported QF_NRA fragment, or is malformed.

    Attributes:
        construct: Name of the offending construct (e.g. "forall", "Int sort").
    """

    def __init__(self, construct: str, detail: str = "") -> None:
        self.construct = construct
        self.detail = detail
        message = f"unsupported construct: {construct}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class MoveUnavailable(SolverError):
    """A substitution would need arithmetic between two distinct algebraic values."""


class RootEndpointError(SolverError, ValueError):
    """A Sturm query endpoint is itself a root of the polynomial."""


class ZeroPolynomialError(SolverError, ValueError):
    """Root isolation was asked for the identically zero polynomial."""


class EmptyIntervalError(SolverError, ValueError):
    """An interval that must contain a rational is empty."""


class UnassignedVariableError(SolverError, KeyError):
    """A polynomial was evaluated with a variable missing from the assignment."""


class NoMovableVariable(SolverError):
    """Every coefficient of a stuck literal vanishes under the current assignment."""


class PreprocessContradiction(SolverError):
    """Preprocessing derived the empty clause."""
