"""Exception hierarchy shared by every module."""


class HyperentropyError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(HyperentropyError, ValueError):
    pass


class UnsupportedSignature(HyperentropyError, ValueError):
    pass


class IncompleteTable(HyperentropyError, ValueError):
    pass


class IncoherentHypergraphon(HyperentropyError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        shown = ", ".join(f"(sigma={s}, cells={c})" for s, c in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" and {len(self.violations) - 5} more"
        super().__init__(f"coherence violated at {shown}{more}")


class ResourceLimit(HyperentropyError, RuntimeError):
    """Raised when an exact computation would exceed its configured budget."""

    def __init__(self, message, required=None, limit=None):
        self.required = required
        self.limit = limit
        super().__init__(message)


class InsufficientGamma(HyperentropyError, ValueError):
    pass


class PreconditionViolation(HyperentropyError, ValueError):
    pass


class InvalidStructure(HyperentropyError, ValueError):
    pass


class InvalidMeasure(HyperentropyError, ValueError):
    pass
