"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """A requested computation exceeds a configured resource cap."""


class UnderResolvedRuleError(ValueError):
    """Quadrature rule too weak for the requested level/degree."""


class CalibrationError(RuntimeError):
    """Neither sign choice met the calibration tolerance."""


class LedgerError(RuntimeError):
    """Conventions ledger file missing keys or unreadable."""


class InsufficientDataError(ValueError):
    """Not enough usable rows for a rate fit."""


class LevelMismatchError(ValueError):
    """Binary operation on operators of different levels."""


class SymbolParseError(ValueError):
    """Expression text rejected; carries the 0-based offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class SymbolSyntaxError(SymbolParseError):
    pass


class UnknownIdentifierError(SymbolParseError):
    pass
