"""
All custom Exceptions
"""

from locstate.constants import EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL


# traceback from exceptions that inherit from this class are suppressed
class CommandLineError(Exception):
    """The traceback of all CommandLineError's is supressed when the
    errors occur on the command line; exit_code is the process status
    the command line reports for this kind of failure.
    """

    exit_code = 1

    def render(self, msg):
        return msg % vars(self)


class ConfigError(CommandLineError):
    exit_code = EXIT_CONFIG

    def __init__(self, msg, source=None, line=None):
        super().__init__(self)
        self.msg = msg
        self.source = source
        self.line = line

    def __str__(self):
        if self.source is not None and self.line is not None:
            return self.render("%(source)s, line %(line)s: %(msg)s")
        if self.source is not None:
            return self.render("%(source)s: %(msg)s")
        return self.render("%(msg)s")


class InvalidGrid(ConfigError):
    def __init__(self, msg):
        super().__init__(msg)

    def __str__(self):
        return self.render("Invalid grid: %(msg)s")


class NumericalError(CommandLineError):
    exit_code = EXIT_NUMERICAL

    def __init__(self, operation, msg):
        super().__init__(self)
        self.operation = operation
        self.msg = msg

    def __str__(self):
        return self.render("%(operation)s: %(msg)s")


class DomainError(NumericalError):
    """An argument is non-finite or outside the domain of the operation."""


class NonFiniteResult(NumericalError):
    def __init__(self, operation):
        super().__init__(operation, "result is not finite")


class QuadratureOrderError(NumericalError):
    def __init__(self, order, max_order):
        super().__init__("gauss_legendre", "")
        self.order = order
        self.max_order = max_order

    def __str__(self):
        return self.render(
            "gauss_legendre: order %(order)s is outside the supported range 1..%(max_order)s"
        )


class SingularVelocity(NumericalError):
    def __init__(self, y, t, modulus):
        super().__init__("bohm_velocity_y", "")
        self.y = y
        self.t = t
        self.modulus = modulus

    def __str__(self):
        return self.render(
            "bohm_velocity_y: the wave function is too close to a node at "
            "y=%(y)r, t=%(t)r (|psi|=%(modulus).3g); the velocity is undefined there"
        )


class GridMismatch(NumericalError):
    def __init__(self, observed_points, reference_points):
        super().__init__("compare_patterns", "")
        self.observed_points = observed_points
        self.reference_points = reference_points

    def __str__(self):
        return self.render(
            "compare_patterns: the observed (%(observed_points)s points) and reference "
            "(%(reference_points)s points) densities are not sampled on the same grid"
        )


class OutputError(CommandLineError):
    exit_code = EXIT_IO

    def __init__(self, path, reason):
        super().__init__(self)
        self.path = path
        self.reason = reason

    def __str__(self):
        return self.render('Cannot write "%(path)s": %(reason)s')
