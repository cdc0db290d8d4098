class WignerwebError(Exception):
    """
    Root of every error raised by the simulation engine
    (configuration problems use ``django.core.exceptions.ValidationError``)
    """


class SpecMismatchError(WignerwebError, ValueError):
    """
    two grids (or a grid and a wave function) sampled differently
    """


class LabelMismatchError(WignerwebError, ValueError):
    pass


class WindowTooSmallError(WignerwebError, ValueError):
    """
    the phase-space window cannot hold the requested support
    """


class SupportMarginError(WindowTooSmallError):
    pass


class MultiplierError(WignerwebError, ValueError):
    """
    a Fourier multiplier is not unit-modulus or differs from 1 at zero frequency
    """


class AngleRangeError(WignerwebError, ValueError):
    pass


class DomainError(WignerwebError, ValueError):
    """
    argument outside the mathematical domain of a closed-form evaluator
    """


class NoPeakFoundError(WignerwebError):
    pass


class DegenerateFitError(WignerwebError, ValueError):
    pass


class ConvergenceError(WignerwebError):
    pass


class NumericalGuardError(WignerwebError):
    """
    a monitored numerical invariant was violated during a run;
    the command line exits with status 2 on these
    """


class NormDriftError(NumericalGuardError):
    pass


class LeakageError(NumericalGuardError):
    pass


class ImaginaryResidueError(NumericalGuardError):
    pass


class UndersamplingError(NumericalGuardError):
    pass
