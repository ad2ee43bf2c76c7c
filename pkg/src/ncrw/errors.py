"""Exceptions shared across the package."""


class ConvergenceError(RuntimeError):
    """A truncated sum or adaptive quadrature failed to reach its tolerance.

    Carries the name of the operation and the truncation/refinement
    parameter that was exhausted, so callers can report what to loosen.
    """

    def __init__(self, operation: str, detail: str):
        super().__init__(f"{operation}: {detail}")
        self.operation = operation
        self.detail = detail
