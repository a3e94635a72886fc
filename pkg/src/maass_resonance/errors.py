"""Exception and warning types raised across the package."""


class ResonanceError(Exception):
    """Base class for all data or numeric errors raised by this package."""


class ParseError(ResonanceError):
    def __init__(self, message, line=None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


class MissingIndex(ResonanceError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"coefficient table has no entry for n={n}")


class NotNormalized(ResonanceError):
    def __init__(self, value):
        self.value = value
        super().__init__(f"lambda(1) must equal 1, got {value!r}")


class NotSelfDual(ResonanceError):
    def __init__(self, n, imag):
        self.n = n
        super().__init__(f"table flagged self-dual but Im lambda({n}) = {imag!r}")


class OutOfRange(ResonanceError):
    def __init__(self, n, n_max):
        self.n = n
        self.n_max = n_max
        super().__init__(f"n={n} outside the table range 1..{n_max}")


class QuadratureNoConvergence(ResonanceError):
    pass


class DegenerateQ(ResonanceError):
    """Phase has a critical point; the integral must be evaluated, not bounded."""


class ZeroLevelCoefficient(ResonanceError):
    def __init__(self, D, value):
        self.D = D
        super().__init__(f"lambda({D}) = {value!r} vanishes; the level-D prefactor is singular")


class CutoffExceedsData(ResonanceError):
    def __init__(self, cutoff, n_max):
        super().__init__(f"dual sum needs n < {cutoff:.6g} but the table stops at {n_max}")


class DegenerateCurve(UserWarning):
    """A resonance curve touched exact zero; log-log fitting is impossible."""


class GuardViolated(UserWarning):
    """r^4 D / X exceeds 1: the asymptotic error terms need not be small."""
