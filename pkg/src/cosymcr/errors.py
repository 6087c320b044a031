class Error(Exception):
    """Generic cosymcr error."""
    pass


class ExpressionSyntaxError(Error):
    """Raised when an expression string cannot be parsed."""

    def __init__(self, message, position=None, source=None):
        self.position = position
        self.source = source
        self.line, self.column = _line_column(source, position)
        if position is not None:
            message = f"{message} (line {self.line}, column {self.column})"
        super().__init__(message)


class UnknownIdentifierError(ExpressionSyntaxError):
    pass


class ArityError(ExpressionSyntaxError):
    pass


class EvaluationError(Error):
    """Raised on division by zero or on an unbound parameter."""

    def __init__(self, message, point=None):
        self.point = point
        if point is not None:
            message = f"{message} at point {tuple(float(c) for c in point)}"
        super().__init__(message)


class ChartMismatchError(Error):
    pass


class UnsupportedDegreeError(Error):
    pass


class UnsupportedDimensionError(Error):
    pass


class SingularMetricError(EvaluationError):
    pass


class NotPositiveDefiniteError(EvaluationError):
    pass


class SectionError(Error):
    """A vector field offered as a 𝒟′ section is not annihilated by η."""
    pass


class LeviFormInconsistencyError(Error):
    """The bracket and the dη expressions of the Levi form disagree."""
    pass


class NotCRIntegrableError(Error):
    pass


class DeformationError(Error):
    pass


class CRChartDataError(Error):
    pass


class ManifoldFileError(Error):
    pass


class ModelSpecError(Error):
    """Unknown model name or parameters outside the model's range."""
    pass


def _line_column(source, position):
    if source is None or position is None:
        return None, None
    before = source[:position]
    line = before.count("\n") + 1
    column = position - (before.rfind("\n") + 1) + 1
    return line, column
