"""Exception hierarchy.

Each class carries the process exit code the CLI maps it to:
2 for configuration problems, 3 for arithmetic or precision failures,
4 when an enumeration cap is exceeded.
"""


class ZdactionError(Exception):
    exit_code = 3


class ConfigError(ZdactionError, ValueError):
    exit_code = 2


class ReducibleMinPoly(ConfigError):
    pass


class ZeroGenerator(ConfigError):
    pass


class CompositeCharacteristic(ConfigError):
    pass


class RamifiedUnsupported(ZdactionError):
    def __init__(self, prime: int, detail: str = ""):
        self.prime = prime
        msg = f"place data above p={prime} cannot be computed automatically"
        if detail:
            msg += f" ({detail})"
        msg += "; supply explicit_places for this prime"
        super().__init__(msg)


class MaximalityNotAttested(ZdactionError):
    pass


class NotAnSUnit(ZdactionError, ValueError):
    pass


class ProductFormulaViolation(ZdactionError):
    pass


class RankUndecidable(ZdactionError):
    pass


class NotMixing(ZdactionError, ValueError):
    pass


class EnclosureNotIntegral(ZdactionError):
    pass


class UnsupportedBackendShape(ZdactionError):
    pass


class SetTooLarge(ZdactionError):
    exit_code = 4


class RepsMissingZero(ZdactionError, ValueError):
    pass


class RepsNotSection(ZdactionError, ValueError):
    pass


class PredicateNotInvariant(ZdactionError, ValueError):
    def __init__(self, msg: str, witness=None):
        self.witness = witness
        super().__init__(msg)
