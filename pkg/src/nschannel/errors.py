"""Shared exception types."""


class NSChannelError(Exception):
    """Base class for all library errors."""


class UnsupportedBoundaryError(NSChannelError):
    """Boundary data outside the two supported noncharacteristic patterns."""


class BlowUpError(NSChannelError):
    """An integration left its admissible domain before reaching the far end."""

    def __init__(self, message, node=None, x=None):
        super().__init__(message)
        self.node = node
        self.x = x


class NonconvergenceError(NSChannelError):
    """An iteration exhausted its budget; carries the last bracket if any."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class InconclusiveError(NSChannelError):
    """A contour computation could not be certified (refinement cap, node
    too close to a zero, or parent/child winding mismatch)."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NumericalFailureError(NSChannelError):
    """NaN or overflow survived rescaling."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step
