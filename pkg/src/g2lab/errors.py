"""Exception types shared across the package."""


class G2LabError(Exception):
    """Base class for all g2lab errors."""


class DegenerateForm(G2LabError):
    """A 3-form failed to induce a positive-definite metric."""


class SingularMetric(G2LabError):
    """A metric field is not symmetric positive-definite at some node."""


class NotClosed(G2LabError):
    """A 3-form violated the closedness precondition."""


class StabilityViolation(G2LabError):
    """Requested time step exceeds the explicit-scheme stability bound."""


class SamplingExhausted(G2LabError):
    """Could not draw enough admissible random samples."""


class ChartMismatch(G2LabError):
    """Two fields do not live on the same grid/link/time slice."""


class CriticalPoint(G2LabError):
    """The radial soliton vector field vanishes inside the domain."""


class SupportViolation(G2LabError):
    """A space-time field violates its compact-support/initial-zero flags."""


class HypothesisViolation(G2LabError):
    """A manufactured subsolution fails its certified differential inequality."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConfigError(G2LabError):
    """Invalid suite configuration (unknown key, bad value, bad section)."""


class EmptySelection(G2LabError):
    """A plot-data selector matched no report records."""


class IoError(G2LabError):
    """Report/plot serialization failed."""
