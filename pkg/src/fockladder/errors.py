"""Exception types raised across the package."""


class FockLadderError(Exception):
    """Base class for all package errors."""


class InvalidParameter(FockLadderError, ValueError):
    """A physical or numerical parameter lies outside its domain."""


class ZeroNormState(FockLadderError, ArithmeticError):
    """An operation annihilated the state (norm below the zero threshold)."""


class TruncationOverflow(FockLadderError, ArithmeticError):
    """The adaptive Fock cutoff or coefficient order exceeded its hard cap."""


class ZeroSuccessProbability(FockLadderError, ArithmeticError):
    """A post-selected cavity branch has vanishing probability."""


class NoSignChange(FockLadderError, ValueError):
    """A root bracket does not enclose a sign change."""


class ConfigError(FockLadderError, ValueError):
    """An experiment configuration is malformed."""
