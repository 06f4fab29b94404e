"""Exception types shared across the simulator.

Every error raised on purpose by this package derives from SimError, so
callers can catch one base type at the CLI boundary.  Frame codec errors
are kept distinct per failure mode because the wire protocol contract
requires callers to be able to tell them apart.
"""


class SimError(Exception):
    """Base class for all simulator errors."""


class GeometryError(SimError):
    """Actuator or mechanism dimensions violate their invariants."""


class DomainError(SimError):
    """An input is outside the validity region of the static model."""


class CalibrationError(SimError):
    """Calibration data is degenerate (no usable squeeze information)."""


class MissingParameterError(SimError):
    """An optional physical parameter is required but absent."""


class BreakdownRiskError(SimError):
    """Drive waveform peak exceeds the dielectric breakdown limit."""

    def __init__(self, peak_kv: float, limit_kv: float):
        super().__init__(
            f"waveform peak {peak_kv:g} kV exceeds breakdown limit {limit_kv:g} kV"
        )
        self.peak_kv = peak_kv
        self.limit_kv = limit_kv


class CapabilityError(SimError):
    """A force target is unreachable at maximum drive voltage."""


class TraceError(SimError):
    """A trace is malformed or too short for the requested analysis."""


class ConfigError(SimError):
    """Configuration failed validation; `field` names the offender."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class FrameError(SimError):
    """Base class for wire-frame codec errors."""


class FrameLengthError(FrameError):
    """Byte buffer is not exactly one frame long."""


class FrameMagicError(FrameError):
    """First byte is not the protocol magic value."""


class FrameTypeError(FrameError):
    """Message type byte is not one of the defined types."""


class FramePayloadError(FrameError):
    """A payload field is NaN or infinite."""
