class RsoccError(Exception):
    """Base class for exceptions from within this package"""


class ConfigError(RsoccError):
    """Raised if a configuration error prevents a command from starting"""


class UnknownOptionError(ConfigError):
    """Raised if a configuration source sets an option that has no packaged default"""

    def __init__(self, option):
        super().__init__(f"Unknown option {option!r}. Check and update the configuration file or command line.")
        self.option = option


class InvalidArgumentError(RsoccError, ValueError):
    """Raised if an argument violates a precondition"""


class DegenerateLevelsError(InvalidArgumentError):
    """Raised if the ideal symbol levels are not strictly increasing"""


class DecodeError(RsoccError):
    """Base class for failures of a receiver stage"""


class DegenerateSignalError(DecodeError):
    """Raised if a gray column has no contrast to normalize"""


class HeaderNotFoundError(DecodeError):
    """Raised if the synchronization header can't be located"""


class InsufficientExtremaError(DecodeError):
    """Raised if fewer than two auxiliary extrema pass the stripe-width window"""


class IncompletePacketError(DecodeError):
    """Raised if no complete packet follows the located header"""
