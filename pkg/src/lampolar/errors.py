"""Exception hierarchy."""


class LampolarError(Exception):
    """Base class for all package errors."""


class ValidationError(LampolarError, ValueError):
    """Invalid input data (material constants, laminate files, options)."""


class MaterialError(ValidationError):
    pass


class UnknownMaterialError(MaterialError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class HybridLaminateError(ValidationError):
    """Raised where an operation is only defined for identical plies."""


class SingularBlockError(LampolarError, ArithmeticError):
    """A block of the constitutive law cannot be inverted."""

    def __init__(self, block: str, det: float | None = None):
        self.block = block
        self.det = det
        msg = f"singular block {block}"
        if det is not None:
            msg += f" (det={det:.3e})"
        super().__init__(msg)


class DenominatorVanishes(LampolarError, ArithmeticError):
    """A closed-form denominator is zero within tolerance: singular laminate."""

    def __init__(self, name: str, value: float):
        self.name = name
        self.value = value
        super().__init__(f"denominator {name} vanishes ({value:.3e})")
