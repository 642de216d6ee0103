class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ConvergenceError(ArithmeticError):
    """A numerical procedure exhausted its budget without meeting its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
