"""Exception hierarchy for hubplatoon."""


class PlatoonError(Exception):
    """Base class for all library errors."""


class DuplicateHub(PlatoonError):
    pass


class UnknownEndpoint(PlatoonError):
    pass


class NonPositiveTravelTime(PlatoonError):
    pass


class InvalidRoute(PlatoonError):
    pass


class Unreachable(PlatoonError):
    pass


class IndexOutOfRange(PlatoonError, IndexError):
    pass


class InvalidTruckSpec(PlatoonError):
    pass


class InfeasiblePlan(PlatoonError):
    pass


class DeadlineInfeasible(PlatoonError):
    pass


class TooLargeForOracle(PlatoonError):
    pass


class ScenarioInvalid(PlatoonError):
    pass


class TruckNotFinished(PlatoonError):
    pass


class ZeroTravelTime(PlatoonError):
    pass


class IncompleteLog(PlatoonError):
    pass
