"""Exception hierarchy shared by all modules."""


class HdsimError(Exception):
    pass


class ParameterError(HdsimError, ValueError):
    """Invalid argument, parameter regime or configuration."""


class NumericalError(HdsimError, ArithmeticError):
    """A computation failed to converge or produced non-finite values."""

    def __init__(self, message, **diagnostics):
        if diagnostics:
            detail = ", ".join(f"{k}={v!r}" for k, v in diagnostics.items())
            message = f"{message} ({detail})"
        super().__init__(message)
        self.diagnostics = diagnostics
