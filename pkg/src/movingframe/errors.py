"""Exception types raised across the package."""


class MovingFrameError(Exception):
    """Base class for all errors raised by :mod:`movingframe`."""


class DimensionError(MovingFrameError, ValueError):
    """Shapes or grids of two objects do not match."""


class OffGridError(MovingFrameError, ValueError):
    """A time was requested that is not a point of the time grid."""


class CommensurabilityError(MovingFrameError, ValueError):
    """A shift or block length is not an integer multiple of the grid spacing."""


class DomainError(MovingFrameError, ValueError):
    """An operator was applied outside of its domain (e.g. a semigroup at t < 0)."""


class WindowError(MovingFrameError, ValueError):
    """The spatial window of a dilation frame is too small for the requested accuracy."""


class SingularEmbeddingError(MovingFrameError, ValueError):
    """A covariance eigenvalue is zero, so the embedding cannot be inverted."""


class RangeError(MovingFrameError, ValueError):
    """An index parameter exceeds the available number of modes."""


class PreconditionError(MovingFrameError, ValueError):
    """Inputs violate a documented precondition (e.g. too few samples)."""


class CertificateError(MovingFrameError, RuntimeError):
    """Coefficients failed the monotonicity certificate required by an experiment."""


class DivergenceError(MovingFrameError, RuntimeError):
    """A time-stepping scheme produced a non-finite or exploding state."""

    def __init__(self, step: int, norm: float):
        self.step = step
        self.norm = norm
        super().__init__(f"state diverged at step {step} (norm={norm!r})")


class ConfigError(MovingFrameError, ValueError):
    """Invalid experiment configuration; ``field`` is the dotted key path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
