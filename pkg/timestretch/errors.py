from collections.abc import Sequence


class TimeStretchError(Exception):
    """Base class for every error raised by timestretch."""


class InvalidSignal(TimeStretchError, ValueError):
    pass


class UnsupportedFormat(TimeStretchError, ValueError):
    pass


class CorruptFile(TimeStretchError, ValueError):
    pass


class IoError(TimeStretchError, OSError):
    pass


class InvalidLength(TimeStretchError, ValueError):
    pass


class InvalidConfig(TimeStretchError, ValueError):
    pass


class ShapeMismatch(TimeStretchError, ValueError):
    pass


class StateMismatch(TimeStretchError, ValueError):
    pass


class NotAFrame(TimeStretchError, ValueError):
    def __init__(self, indices: Sequence[int], message: str | None = None):
        self.indices = [int(i) for i in indices]
        shown = ", ".join(str(i) for i in self.indices[:8])
        if len(self.indices) > 8:
            shown += ", ..."
        super().__init__(
            message
            or f"frame diagonal is not positive at {len(self.indices)} "
            f"sample(s): [{shown}]"
        )


class InvalidRate(TimeStretchError, ValueError):
    def __init__(self, rate: float, allowed: str):
        self.rate = rate
        super().__init__(f"rate {rate} outside {allowed}")


class InfeasibleRate(TimeStretchError, ValueError):
    def __init__(self, rate: float, minimum_rate: float, reason: str):
        self.rate = rate
        self.minimum_rate = minimum_rate
        super().__init__(
            f"rate {rate} is infeasible ({reason}); "
            f"minimum feasible rate is {minimum_rate:.6f}"
        )
