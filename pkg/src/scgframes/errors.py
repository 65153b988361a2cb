"""Exception hierarchy shared by all modules."""


class FrameError(Exception):
    """Base class for errors raised by scgframes."""


class DimensionError(FrameError, ValueError):
    """Shapes of operators, vectors or masks do not agree."""


class NumericalError(FrameError):
    """An eigensolver or other numerical kernel failed."""


class NotAFrameError(FrameError):
    """The frame operator is singular (lower frame bound is zero)."""


class PreconditionError(FrameError):
    """Inputs are well formed but violate a hypothesis of the check.

    For example a non-Parseval family passed to the Parseval identity
    check, or a candidate dual that does not reconstruct.
    """


class GateError(FrameError):
    """Perturbation parameters fail ``max(l1 + mu/sqrt(A), l2) < 1``."""


class ConfigError(FrameError, ValueError):
    """Invalid construction parameters or experiment configuration."""
