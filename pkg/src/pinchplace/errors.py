"""Exception types raised by the placement library."""


class PlacementError(Exception):
    """Base class for placement failures."""


class PlacementStateError(PlacementError):
    """The placement state does not allow the requested step."""


class ModelViolationError(PlacementError):
    """The linearized phase model does not hold at the reference point.

    Raised when the local phase slope is not positive, i.e. the phase seen by a
    receive antenna would not increase as the PA moves along the waveguide.
    """


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
