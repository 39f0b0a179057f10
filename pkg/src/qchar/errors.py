"""Exception types raised across qchar."""


class QCharError(Exception):
    """Base class for all qchar errors."""


class PolySyntaxError(QCharError, ValueError):
    """Polynomial text does not match the grammar."""

    def __init__(self, message, position, text=""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class ConstantTermError(QCharError, ValueError):
    """Polynomial has a nonzero constant term, so q(0) != 0."""


class ArityError(QCharError, ValueError):
    """Arity of a polynomial or point does not match what the operation needs."""


class InadmissiblePolynomialError(QCharError, ValueError):
    """Polynomial fails the admissibility conditions; carries the report."""

    def __init__(self, report):
        self.report = report
        kinds = ", ".join(sorted({v.kind.value for v in report.violations}))
        super().__init__(f"polynomial is not admissible ({kinds})")


class AdmissiblePolynomialError(QCharError, ValueError):
    """A falsification run was requested for an admissible polynomial."""


class DerivativeOrderError(QCharError, ValueError):
    """Requested derivative order exceeds the configured cap."""


class CoarseGridError(QCharError, ValueError):
    """Grid undersamples the derivative/density ratio profile."""


class GridMassError(QCharError, ValueError):
    """Grid span leaves too much probability mass outside."""
