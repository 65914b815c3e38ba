"""Exception types raised across the package."""


class EntobsError(Exception):
    """Base class for every error raised by entobs."""


class NotFinite(EntobsError, ValueError):
    pass


class NotHermitian(EntobsError, ValueError):
    pass


class NoConvergence(EntobsError, ArithmeticError):
    pass


class NonRealExpectation(EntobsError, ValueError):
    pass


class MissingParameter(EntobsError, KeyError):
    def __init__(self, name: str, form: str = ""):
        self.name = name
        self.form = form
        where = f" for {form}" if form else ""
        super().__init__(f"missing parameter {name!r}{where}")

    def __str__(self) -> str:
        return self.args[0]


class TraceNotOne(EntobsError, ValueError):
    pass


class NotPositive(EntobsError, ValueError):
    pass


class InvalidWeights(EntobsError, ValueError):
    pass


class PositivityViolation(EntobsError, ValueError):
    pass


class DomainError(EntobsError, ValueError):
    """Negative radicand met while evaluating a formula as printed."""


class CalibrationFailure(EntobsError):
    def __init__(self, message: str, kappa: float = float("nan"), residual: float = float("nan")):
        super().__init__(message)
        self.kappa = kappa
        self.residual = residual


class UnsupportedPairing(EntobsError, ValueError):
    pass
