"""Exception types raised by the simulator."""


class DomainError(ValueError):
    """An input lies outside the domain a model is defined on."""


class InvalidRegionError(ValueError):
    """A bias region does not satisfy the negative-resistance precondition."""


class NotOscillatingError(ValueError):
    """The diode is biased outside the region where it oscillates."""


class ConfigurationError(ValueError):
    """Inconsistent signal-processing parameters (e.g. undersampled waveform)."""


class InsufficientDataError(ValueError):
    """A trace is too short for the requested estimate."""


class ValidationError(ValueError):
    """A scenario configuration failed validation; the message names the field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
