"""Exception types shared across scalegauge."""


class ScalegaugeError(Exception):
    pass


class DomainError(ScalegaugeError, ValueError):
    """A site, field value or argument lies outside its allowed domain."""


class PathError(ScalegaugeError, ValueError):
    """Consecutive sites of a lattice path are not nearest neighbours."""


class ConfigError(ScalegaugeError, ValueError):
    pass


class FormatError(ScalegaugeError, ValueError):
    """An outcome symbol string cannot be interpreted as a number."""


class NonFiniteError(ScalegaugeError, ArithmeticError):
    """An arithmetic result overflowed or became NaN."""


class StructureMismatch(ScalegaugeError, TypeError):
    """Arithmetic was attempted between objects living in different site structures.

    Carries both site tags so the offending pair can be reported.
    """

    def __init__(self, left, right, what="number"):
        self.left = left
        self.right = right
        super().__init__(
            f"cannot combine {what} in structure at {left} with one at {right}; "
            "transport one of them first"
        )
