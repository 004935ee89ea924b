"""
Exception hierarchy shared by every looplab module
"""


class LoopLabError(Exception):
    """Base class for all looplab failures"""


class InvalidArgument(LoopLabError, ValueError):
    """A parameter or input value is outside its admissible range"""


class SingularInput(LoopLabError, ZeroDivisionError):
    """A closed-form expression would divide by a vanishing quantity"""


class EmbeddingInvalid(LoopLabError):
    """A domain violates the rhombic-embedding invariants"""


class ResourceLimit(LoopLabError):
    """Exhaustive enumeration would exceed the configured cap"""

    def __init__(self, requested, cap):
        super().__init__(f"{requested} configurations requested, cap is {cap}")
        self.requested = requested
        self.cap = cap


class MalformedConfiguration(LoopLabError):
    """A configuration cannot be traced (revisits, bulk ends)"""


class DegenerateParameters(LoopLabError):
    """Parameters sit on a measure-zero set where a factor vanishes"""

    def __init__(self, factor, value):
        super().__init__(f"degenerate parameters: {factor} = {value!r}")
        self.factor = factor
        self.value = value


class IdentityMismatch(LoopLabError):
    """An enumerated sum disagrees with its closed form"""
