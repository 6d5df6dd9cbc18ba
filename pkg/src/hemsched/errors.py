"""Exception hierarchy shared by every module."""


class HemsError(Exception):
    """Base class for all errors raised by hemsched."""


class ConfigError(HemsError, ValueError):
    """A problem, tariff, or parameter set is malformed or infeasible."""


class TariffValidationError(ConfigError):
    """Tariff bands leave minutes uncovered, overlap, or carry bad prices."""


class EncodingError(HemsError, ValueError):
    """A genome does not match the layout of its problem."""


class StructuralError(HemsError, ValueError):
    """A schedule's shape does not match its problem."""


class UndefinedPARError(HemsError, ZeroDivisionError):
    """Peak-to-average ratio requested for an all-zero energy profile."""


class SearchSpaceTooLarge(HemsError):
    """Exhaustive enumeration refused because the genome space is too big."""

    def __init__(self, size: int, limit: int):
        super().__init__(f"search space has {size} genomes, limit is {limit}")
        self.size = size
        self.limit = limit


class ScenarioError(HemsError):
    """An optimizer failed for one user of a multi-user scenario."""

    def __init__(self, user: int, cause: BaseException):
        super().__init__(f"user {user}: {cause}")
        self.user = user
        self.cause = cause
