"""Exception types shared across the pipeline."""


class J2AigError(Exception):
    """Base class for all tool errors."""


class LexError(J2AigError):
    def __init__(self, msg, line, col):
        super().__init__(f"{msg} at {line}:{col}")
        self.line = line
        self.col = col


class ParseError(J2AigError):
    def __init__(self, msg, line=None, col=None):
        loc = f" at {line}:{col}" if line is not None else ""
        super().__init__(msg + loc)
        self.line = line
        self.col = col


class RestrictionError(J2AigError):
    """Source violates one of the language restrictions (not a syntax error)."""


class CheckError(J2AigError):
    """Static check failed (undeclared name, sort mismatch, bad arity...)."""


class DuplicateSpecName(J2AigError):
    pass


class PostWithoutPre(J2AigError):
    pass


class UnknownFunction(J2AigError):
    pass


class ArityMismatch(J2AigError):
    pass


class ArraySizeMismatch(J2AigError):
    pass


class NonConstantRange(J2AigError):
    """Quantifier bounds are not compile-time constants."""


class NestedUnsupported(J2AigError):
    """Quantifier body contains a function call."""


class DivisionByZero(J2AigError):
    pass


class OutOfBounds(J2AigError):
    def __init__(self, index, size, name=""):
        super().__init__(f"index {index} out of bounds for {name or 'array'}[{size}]")
        self.index = index
        self.size = size


class DepthExceeded(J2AigError):
    """Recursion frame stack pointer left its legal range."""


class StepLimitExceeded(J2AigError):
    def __init__(self, limit):
        super().__init__(f"execution exceeded {limit} steps")
        self.limit = limit


class MissingSymbol(J2AigError):
    pass


class UnsupportedOp(J2AigError):
    pass


class IoError(J2AigError):
    pass


class FormatError(J2AigError):
    def __init__(self, msg, line=None):
        loc = f" (line {line})" if line is not None else ""
        super().__init__(msg + loc)
        self.line = line


class ResourceLimit(J2AigError):
    pass


class TerminationUnproved(J2AigError):
    pass
