"""Moving-frame numerics: dilations of diagonal semigroups, frame transport
between semilinear SPDEs and SDEs, staged Itô approximations and uniqueness
experiments for the diagonal Tanaka equation."""

from .errors import (
    CertificateError,
    CommensurabilityError,
    ConfigError,
    DimensionError,
    DivergenceError,
    DomainError,
    MovingFrameError,
    OffGridError,
    PreconditionError,
    RangeError,
    SingularEmbeddingError,
    WindowError,
)
from .moving_frame import CoefficientPair, delta, frame_coefficients, gamma, x_from_y, y_from_x
from .noise import DriverBundle, QWienerPath, associate_q_wiener, recover_components, sample_driver
from .semigroups import DiagonalGroup, DiagonalSemigroup, DilationFrame, GroupFrame, TranslationGroup, build_dilation
from .solvers import euler_maruyama, exp_euler_mild
from .spaces import PathRecord, SpatialGrid, TimeGrid

__version__ = "0.1.0"

__all__ = [
    "CertificateError",
    "CoefficientPair",
    "CommensurabilityError",
    "ConfigError",
    "DiagonalGroup",
    "DiagonalSemigroup",
    "DilationFrame",
    "DimensionError",
    "DivergenceError",
    "DomainError",
    "DriverBundle",
    "GroupFrame",
    "MovingFrameError",
    "OffGridError",
    "PathRecord",
    "PreconditionError",
    "QWienerPath",
    "RangeError",
    "SingularEmbeddingError",
    "SpatialGrid",
    "TimeGrid",
    "TranslationGroup",
    "WindowError",
    "associate_q_wiener",
    "build_dilation",
    "delta",
    "euler_maruyama",
    "exp_euler_mild",
    "frame_coefficients",
    "gamma",
    "recover_components",
    "sample_driver",
    "x_from_y",
    "y_from_x",
]
