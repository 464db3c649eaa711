"""Exception hierarchy shared by every module.

Each error carries the process exit code the CLI uses for it: 2 for domain
errors, 3 when a budget ran out or a decision could not be certified.
"""

from typing import Optional


class BudError(Exception):
    """Base class for all errors raised by the library"""

    exit_code: int = 2


class DomainError(BudError, ValueError):
    """Input outside the domain of an operation"""


class InvalidAlphabet(DomainError):
    pass


class DigitOutOfRange(DomainError):
    def __init__(self, message: str, digit: Optional[int] = None):
        super().__init__(message)
        self.digit = digit


class InvalidSeed(DomainError):
    pass


class NearTie(DomainError):
    """A digit decision fell within the tie guard of an integer boundary"""

    def __init__(self, position: int, boundary: int, value):
        super().__init__(
            f"digit {position} is within the tie guard of boundary {boundary} (beta*r = {value})"
        )
        self.position = position
        self.boundary = boundary
        self.value = value


class XOutOfRange(DomainError):
    pass


class BaseOutOfRange(DomainError):
    pass


class NotEventuallyPeriodic(DomainError):
    pass


class NotQuasiGreedy(DomainError):
    pass


class NotAdmissible(DomainError):
    def __init__(self, block, witness: str = ""):
        text = f"block {block} is not admissible"
        if witness:
            text += f": {witness}"
        super().__init__(text)
        self.block = block
        self.witness = witness


class EmptyGraph(DomainError):
    pass


class BudgetExceeded(BudError):
    exit_code = 3

    def __init__(self, what: str, requested: int, limit: int):
        super().__init__(f"{what}: {requested} exceeds the configured limit {limit}")
        self.requested = requested
        self.limit = limit


class DepthExceeded(BudError):
    exit_code = 3


class Undecided(BudError):
    exit_code = 3
