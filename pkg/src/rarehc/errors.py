class DomainError(ValueError):
    """A parameter or data value lies outside the domain an operation accepts."""


class BracketError(RuntimeError):
    """Root bracketing failed while solving for a boundary point."""
