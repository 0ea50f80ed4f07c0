"""Exception hierarchy shared by every module in the package."""


class BoundInfoError(Exception):
    """Base class for all package errors."""


class NormalizationError(BoundInfoError, ValueError):
    pass


class AlphabetError(BoundInfoError, ValueError):
    pass


class NameCollisionError(BoundInfoError, ValueError):
    pass


class UnknownRegisterError(BoundInfoError, KeyError):
    pass


class ZeroProbabilityError(BoundInfoError, ValueError):
    pass


class OwnershipError(BoundInfoError, PermissionError):
    pass


class OverlapError(BoundInfoError, ValueError):
    pass


class AlphabetMismatchError(BoundInfoError, ValueError):
    pass


class SearchBudgetError(BoundInfoError, RuntimeError):
    pass


class ShapeError(BoundInfoError, ValueError):
    pass


class DisconnectedGraphError(BoundInfoError, ValueError):
    pass


class LabelError(BoundInfoError, KeyError):
    pass


class NumericalRankError(BoundInfoError, ArithmeticError):
    pass


class BasisError(BoundInfoError, ValueError):
    pass


class UnknownTableError(BoundInfoError, KeyError):
    pass


class UnknownProtocolError(BoundInfoError, KeyError):
    pass
