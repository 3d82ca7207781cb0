"""Exception and warning types raised across the package."""


class PTLatticeError(Exception):
    """Base class for every error raised by ptlat."""


class DepthTooLarge(PTLatticeError, ValueError):
    def __init__(self, depth, n):
        super().__init__(f"coupling depth {depth} needs n >= {2 * depth + 1}, got n={n}")
        self.depth = depth
        self.n = n


class NonFinite(PTLatticeError, ValueError):
    pass


class NotSymmetrizable(PTLatticeError):
    """Raised when some off-diagonal product sup[d]*sub[d] is not positive."""

    def __init__(self, depth, product):
        super().__init__(f"off-diagonal product at position {depth} is {product!r} <= 0")
        self.depth = depth
        self.product = product


class NoConvergence(PTLatticeError, ArithmeticError):
    def __init__(self, max_iterations, where=None):
        msg = f"QR iteration did not converge within {max_iterations} iterations"
        if where is not None:
            msg += f" ({where})"
        super().__init__(msg)
        self.max_iterations = max_iterations
        self.where = where


class NotAnEigenvalue(PTLatticeError, ValueError):
    pass


class DegenerateEigenvalue(PTLatticeError, ValueError):
    pass


class DegenerateSpectrum(PTLatticeError):
    pass


class NonRealSpectrum(DegenerateSpectrum):
    """Spectrum has complex pairs; subclass of DegenerateSpectrum so that a
    single except clause covers every failed spectral precondition."""


class UnexpectedKernelDimension(PTLatticeError):
    def __init__(self, dim, expected):
        super().__init__(f"kernel dimension {dim}, expected {expected}")
        self.dim = dim
        self.expected = expected


class AnsatzKernelNotOneDimensional(PTLatticeError):
    def __init__(self, nullity):
        super().__init__(f"restricted band system has nullity {nullity}, expected 1")
        self.nullity = nullity


class DegenerateParameters(PTLatticeError, ValueError):
    pass


class Mismatch(PTLatticeError):
    """Closed-form element disagrees with the exact solve.

    ``report`` carries the full VerificationReport so callers can still
    serialize it.
    """

    def __init__(self, position, got, expected, report=None):
        super().__init__(f"element at {position}: got {got}, expected {expected}")
        self.position = position
        self.got = got
        self.expected = expected
        self.report = report


class SingularMatrix(PTLatticeError, ArithmeticError):
    pass


class RationalOverflow(PTLatticeError, OverflowError):
    pass


class DimensionMismatch(PTLatticeError, ValueError):
    pass


class NotPositiveDefinite(PTLatticeError):
    pass


class SingularTheta(PTLatticeError, ArithmeticError):
    pass


class NoSignChange(PTLatticeError):
    def __init__(self, lo, hi, count):
        super().__init__(f"real_count is {count} at both ends of [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self.count = count


class MultipleTransitions(PTLatticeError):
    def __init__(self, points):
        super().__init__(f"more than one real_count transition near {points}")
        self.points = points


class IndefiniteMetricWarning(UserWarning):
    """Inner product evaluated with a metric that is not positive definite."""
