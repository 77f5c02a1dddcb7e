"""Exception hierarchy shared by every module."""


class EntangleError(Exception):
    """Base class for all library errors."""


class NonFinite(EntangleError, ValueError):
    pass


class NotHermitian(EntangleError, ValueError):
    pass


class NotPSD(EntangleError, ValueError):
    pass


class NotUnitTrace(EntangleError, ValueError):
    pass


class DimensionMismatch(EntangleError, ValueError):
    pass


class ZeroState(EntangleError, ValueError):
    pass


class DimBTooSmall(EntangleError, ValueError):
    pass


class NotNormalized(EntangleError, ValueError):
    pass


class NoTwin(EntangleError, ValueError):
    """The nearby observable does not commute with the reduced density."""


class InvalidTwin(EntangleError, ValueError):
    pass


class BadOutcomeIndex(EntangleError, IndexError):
    pass


class NotOrthogonal(EntangleError, ValueError):
    pass


class NotCommuting(EntangleError, ValueError):
    pass


class OutsideRange(EntangleError, ValueError):
    """A requested projector reaches outside the range of the reduced density."""


class ParseError(EntangleError, ValueError):
    pass


class SideMismatch(EntangleError, ValueError):
    pass
