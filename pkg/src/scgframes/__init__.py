"""Numerical toolkit for semi-continuous g-frames on finite-dimensional spaces."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DiscreteMeasureSpace,
    FrameBounds,
    GOperatorFamily,
    IndexSet,
    SubsetMask,
    analysis_energy,
    validate_family,
)
from .engine import (  # noqa: E402
    canonical_dual,
    frame_bounds,
    frame_operator,
    is_bessel,
    is_frame,
    is_parseval,
    reconstruct,
    verify_alternate_dual,
)
from .errors import (  # noqa: E402
    ConfigError,
    DimensionError,
    FrameError,
    GateError,
    NotAFrameError,
    NumericalError,
    PreconditionError,
)
