"""
Dimensionless parameter sets of the kicked harmonic oscillator
and of its thermal reservoir
"""
import math
from dataclasses import asdict, dataclass

from .exceptions import DomainError


@dataclass(frozen=True)
class SystemParams:
    """
    kick strength ``K``, Lamb-Dicke parameter ``eta``,
    rotation angle per kick ``nu_tau`` and kick period ``tau``;
    the effective Planck constant is derived, never stored
    """
    K: float
    eta: float
    nu_tau: float = math.pi / 3
    tau: float = 1.0

    def __post_init__(self):
        if self.K < 0:
            raise DomainError('K must be >= 0, got {0}'.format(self.K))
        if self.eta <= 0:
            raise DomainError('eta must be > 0, got {0}'.format(self.eta))
        if self.tau <= 0:
            raise DomainError('tau must be > 0, got {0}'.format(self.tau))

    @property
    def hbar_eff(self):
        return 2 * self.eta ** 2

    @property
    def semiclassical(self):
        return self.eta < 1

    def replace(self, **kwargs):
        options = asdict(self)
        options.update(kwargs)
        return self.__class__(**options)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DecoherenceParams:
    """
    ``D``: per-kick diffusion parameter (smoothing variance 2D per quadrature)
    ``gamma_tau``: dissipation per kick period
    ``nbar``: thermal occupation of the reservoir
    """
    D: float = 0.0
    gamma_tau: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        for field in ('D', 'gamma_tau', 'nbar'):
            value = getattr(self, field)
            if value < 0:
                raise DomainError('{0} must be >= 0, got {1}'.format(field, value))

    @property
    def unitary(self):
        return self.D == 0 and self.gamma_tau == 0

    @property
    def purely_diffusive(self):
        return self.gamma_tau == 0 and self.D > 0

    @property
    def purely_dissipative(self):
        return self.D == 0 and self.gamma_tau > 0

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ChiParams:
    chi: float

    @classmethod
    def from_params(cls, params, D):
        from .decoherence import chi
        return cls(chi=chi(params.K, params.eta, D))

    @property
    def approximation_valid(self):
        return self.chi <= 1
