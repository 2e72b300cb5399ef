"""Exception hierarchy shared by all modules."""


class LeadLagError(ValueError):
    """Base class for user-facing errors raised by this package."""


class NonMonotoneTime(LeadLagError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"timestamp at index {index} is not strictly increasing")


class NonPositivePrice(LeadLagError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"price at index {index} is not positive")


class TooShort(LeadLagError):
    pass


class ParseError(LeadLagError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class WindowTooShort(LeadLagError):
    pass


class ZeroResolution(LeadLagError):
    pass


class DomainError(LeadLagError):
    pass


class InterleavingViolation(LeadLagError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"interleaving assumption violated at index {index}")


class InvalidConfig(LeadLagError):
    pass
