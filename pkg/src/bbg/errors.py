"""Exception types shared across the package."""


class BBGError(Exception):
    """Base class for all library errors."""


class ParamInconsistency(BBGError):
    pass


class InfeasibleMargins(ParamInconsistency):
    pass


class DegreeViolation(BBGError):
    pass


class DuplicateEdge(BBGError):
    pass


class IndexOutOfRange(BBGError):
    pass


class ParseError(BBGError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class SizeLimitExceeded(BBGError):
    pass


class AnchorPatternMismatch(BBGError):
    pass


class InvalidSwitching(BBGError):
    pass


class CompletionImpossible(BBGError):
    pass


class NoValidSwitching(BBGError):
    pass


class DomainError(BBGError):
    pass


class DimensionMismatch(BBGError):
    pass


class DegenerateRegime(BBGError):
    pass


class NotUnitVector(BBGError):
    pass


class NotMeanZero(BBGError):
    pass


class EmptySubset(BBGError):
    pass


class CapExceeded(BBGError):
    pass


class ConvergenceFailure(BBGError):
    def __init__(self, message, residual=None, iterations=None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual={residual}, iterations={iterations})")


class NonSquareParams(BBGError):
    pass


class RejectionBudgetExceeded(BBGError):
    pass


class RegimeRefused(BBGError):
    pass
