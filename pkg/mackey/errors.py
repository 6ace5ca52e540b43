"""
Exception hierarchy shared by every module of the toolkit
"""

from typing import Optional


class MackeyError(Exception):
    """Base class for all toolkit errors"""


class InputError(MackeyError, ValueError):
    """Malformed input: bad permutation, non-prime ell, shape mismatch, ..."""


class PreconditionError(MackeyError, ValueError):
    """A documented precondition of an operation does not hold"""


class ContractError(MackeyError):
    """An object violates its structural contract (ill-defined map, broken axiom of a module)"""


class SizeCapError(MackeyError):
    """A configured size cap was exceeded"""

    def __init__(self, message: str, dimension: Optional[int] = None, cap: Optional[int] = None):
        super().__init__(message)
        self.dimension = dimension
        self.cap = cap
