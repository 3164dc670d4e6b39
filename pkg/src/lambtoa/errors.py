"""Exception hierarchy shared across the toolkit."""


class LambToaError(Exception):
    """Base class for all toolkit errors."""


class BranchLost(LambToaError):
    """Mode tracing lost the branch (no sign change in the continuation window)."""


class EmptyRange(LambToaError):
    """A requested range selects no samples."""


class NyquistViolation(LambToaError):
    """Requested frequency is at or above the Nyquist limit."""


class BandNotCovered(LambToaError):
    """The dispersion curve does not cover the source's occupied band."""


class ZeroSignal(LambToaError):
    """Operation requires a signal with nonzero rms."""


class CutoffOutOfRange(LambToaError):
    """Filter cutoff outside (0, Nyquist)."""


class IndexOutOfRange(LambToaError):
    """Sensor or impact index outside the layout."""


class WindowTooLong(LambToaError):
    """Averaging window does not fit into the signal."""


class DegenerateWindow(LambToaError):
    """Analysis window shorter than three samples."""


class FrequencyOutOfRange(LambToaError):
    """Requested analysis frequency outside (0, Nyquist)."""


class InconsistentChannels(LambToaError):
    """Multi-channel inputs do not share a common grid."""


class MissingReference(LambToaError):
    """Reference channel absent from the estimate set."""


class NonpositiveEstimate(LambToaError):
    """Speed back-estimation requires strictly positive arrival times."""


class ConfigError(LambToaError):
    """Invalid run configuration; carries the JSON path of the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")
