"""
Phase-space grid representation and the two spectral primitives
(Fourier multipliers and Gaussian convolution) every propagator
is built from.

Conventions:
    * ``values[i, j]`` samples W(q_i, p_j), q_i = q_min + i*dq,
      p_j = p_min + j*dp (periodic, half-open windows)
    * the conjugate frequency of a coordinate x is ``mu`` with
      F(mu) = sum_x f(x) exp(+i mu x), so the multiplier
      exp(i mu a) shifts a distribution by +a
"""
import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np
from scipy import fft as sp_fft

from . import settings as app_settings
from .exceptions import (ImaginaryResidueError, LabelMismatchError, LeakageError, MultiplierError,
                         SpecMismatchError, SupportMarginError, WindowTooSmallError)
from .utils import is_power_of_two

logger = logging.getLogger(__name__)

MIN_POINTS = 64
SUPPORT_SIGMAS = 6


class Label(str, Enum):
    QUANTUM = 'quantum'
    CLASSICAL = 'classical'


class Axis(str, Enum):
    Q = 'q'
    P = 'p'


@dataclass(frozen=True)
class GridSpec:
    n_q: int
    n_p: int
    q_min: float
    q_max: float
    p_min: float
    p_max: float

    def __post_init__(self):
        for name in ('n_q', 'n_p'):
            n = getattr(self, name)
            if not is_power_of_two(n) or n < MIN_POINTS:
                raise ValueError('{0} must be a power of two >= {1}, got {2}'.format(name, MIN_POINTS, n))
        if not self.q_max > self.q_min:
            raise ValueError('q_max must be greater than q_min')
        if not self.p_max > self.p_min:
            raise ValueError('p_max must be greater than p_min')

    @classmethod
    def square(cls, n, low=None, high=None):
        if low is None:
            low, high = app_settings.DEFAULT_WINDOW
        return cls(n_q=n, n_p=n, q_min=low, q_max=high, p_min=low, p_max=high)

    @property
    def width_q(self):
        return self.q_max - self.q_min

    @property
    def width_p(self):
        return self.p_max - self.p_min

    @property
    def dq(self):
        return self.width_q / self.n_q

    @property
    def dp(self):
        return self.width_p / self.n_p

    @property
    def cell_area(self):
        return self.dq * self.dp

    @property
    def area(self):
        return self.width_q * self.width_p

    @property
    def shape(self):
        return (self.n_q, self.n_p)

    @property
    def q(self):
        return self.q_min + self.dq * np.arange(self.n_q)

    @property
    def p(self):
        return self.p_min + self.dp * np.arange(self.n_p)

    def mesh(self):
        return np.meshgrid(self.q, self.p, indexing='ij')

    def coordinate(self, axis):
        return self.q if Axis(axis) is Axis.Q else self.p

    def frequencies(self, axis):
        """
        conjugate frequencies ``mu`` in FFT order along ``axis``
        """
        if Axis(axis) is Axis.Q:
            n, d = self.n_q, self.dq
        else:
            n, d = self.n_p, self.dp
        return -2 * np.pi * sp_fft.fftfreq(n, d)

    def contains(self, center, margin):
        q0, p0 = center
        return (self.q_min + margin <= q0 <= self.q_max - margin and
                self.p_min + margin <= p0 <= self.p_max - margin)

    def as_dict(self):
        return asdict(self)


class PhaseSpaceGrid(object):
    """
    immutable real-valued distribution sampled on a ``GridSpec``
    """
    def __init__(self, spec, values, label=Label.QUANTUM):
        values = np.array(values, dtype=np.float64, copy=True).reshape(spec.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError('grid values must be finite')
        values.flags.writeable = False
        self.spec = spec
        self.values = values
        self.label = Label(label)

    def __repr__(self):
        return '<PhaseSpaceGrid {0} {1}x{2}>'.format(self.label.value, self.spec.n_q, self.spec.n_p)

    def with_values(self, values):
        return self.__class__(self.spec, values, self.label)

    def relabel(self, label):
        return self.__class__(self.spec, self.values, label)

    @property
    def norm(self):
        return riemann_norm(self)

    @classmethod
    def zeros(cls, spec, label=Label.QUANTUM):
        return cls(spec, np.zeros(spec.shape), label)


def check_same_spec(a, b):
    if a.spec != b.spec:
        raise SpecMismatchError('grids are sampled on different specs: {0} != {1}'.format(a.spec, b.spec))


def check_label(grid, label):
    if grid.label is not Label(label):
        raise LabelMismatchError('expected a {0} grid, got {1}'.format(Label(label).value, grid.label.value))


def _gaussian_at(q, p, center, variance):
    q0, p0 = center
    return np.exp(-((q - q0) ** 2 + (p - p0) ** 2) / (2 * variance)) / (2 * np.pi * variance)


def _gaussian(spec, center, variance):
    Q, P = spec.mesh()
    return _gaussian_at(Q, P, center, variance)


def coherent_density(center, eta):
    """
    returns the coherent-state density as a callable of ``(q, p)`` arrays
    """
    if eta <= 0:
        raise ValueError('eta must be > 0')
    variance = eta ** 2

    def density(q, p):
        return _gaussian_at(q, p, center, variance)
    return density


def new_coherent_state(spec, center, eta, label=Label.QUANTUM):
    """
    Wigner function of a coherent state, width ``eta`` per quadrature
    """
    if not spec.contains(center, SUPPORT_SIGMAS * eta):
        raise SupportMarginError('a coherent state of width {0} centered at {1} needs a margin '
                                 'of {2} to every edge of the window'.format(eta, tuple(center),
                                                                             SUPPORT_SIGMAS * eta))
    return PhaseSpaceGrid(spec, _gaussian(spec, center, eta ** 2), label)


def new_cat_state(spec, q0, eta, label=Label.QUANTUM):
    """
    closed-form Wigner function of the even superposition of
    two coherent states centered at (+q0, 0) and (-q0, 0)
    """
    if not spec.contains((abs(q0), 0), SUPPORT_SIGMAS * eta):
        raise SupportMarginError('cat state components at +/-{0} do not fit the window'.format(q0))
    variance = eta ** 2
    Q, P = spec.mesh()
    envelope = _gaussian(spec, (0, 0), variance)
    values = (_gaussian(spec, (q0, 0), variance) +
              _gaussian(spec, (-q0, 0), variance) +
              2 * envelope * np.cos(P * q0 / variance))
    values /= 2 * (1 + math.exp(-q0 ** 2 / (2 * variance)))
    return PhaseSpaceGrid(spec, values, label)


def riemann_norm(grid):
    return float(np.sum(grid.values) * grid.spec.cell_area)


def negativity_volume(grid):
    return float(-np.sum(np.minimum(grid.values, 0.0)) * grid.spec.cell_area)


def moments(grid):
    """
    returns ``(centroid, variances)`` as two ``(q, p)`` tuples
    """
    Q, P = grid.spec.mesh()
    w = grid.values
    total = np.sum(w)
    q_mean = np.sum(Q * w) / total
    p_mean = np.sum(P * w) / total
    q_var = np.sum((Q - q_mean) ** 2 * w) / total
    p_var = np.sum((P - p_mean) ** 2 * w) / total
    return (float(q_mean), float(p_mean)), (float(q_var), float(p_var))


def boundary_leakage(grid, band=None):
    """
    mass (in absolute value) held inside the guard band along the window edges
    """
    band = app_settings.GUARD_BAND if band is None else band
    spec = grid.spec
    rows = max(1, int(math.ceil(band * spec.n_q)))
    cols = max(1, int(math.ceil(band * spec.n_p)))
    mask = np.zeros(spec.shape, dtype=bool)
    mask[:rows, :] = mask[-rows:, :] = True
    mask[:, :cols] = mask[:, -cols:] = True
    return float(np.sum(np.abs(grid.values[mask])) * spec.cell_area)


def check_leakage(grid, tolerance=None):
    tolerance = app_settings.LEAKAGE_TOLERANCE if tolerance is None else tolerance
    leakage = boundary_leakage(grid)
    if leakage > tolerance:
        logger.error('boundary leakage %.3e exceeds %.1e', leakage, tolerance)
        raise LeakageError('mass {0:.3e} reached the guard band of the window '
                           '(tolerance {1:.1e}); enlarge the window'.format(leakage, tolerance))
    return leakage


def _axis_index(axis):
    return 0 if Axis(axis) is Axis.Q else 1


def line_arguments(spec, axis):
    """
    returns ``(mu, transverse)`` shaped to broadcast against ``values``
    """
    if Axis(axis) is Axis.Q:
        return spec.frequencies(Axis.Q)[:, None], spec.p[None, :]
    return spec.frequencies(Axis.P)[None, :], spec.q[:, None]


def _project_real(spec, result):
    residue = float(np.sum(np.abs(result.imag)) * spec.cell_area)
    if residue > app_settings.IMAG_TOLERANCE:
        raise ImaginaryResidueError('discarded imaginary mass {0:.3e} exceeds {1:.1e}; the grid does not '
                                    'resolve the distribution'.format(residue, app_settings.IMAG_TOLERANCE))
    return result.real


def spectral_apply(grid, multiplier, axes):
    """
    transforms ``grid`` along ``axes``, multiplies by the precomputed
    ``multiplier`` array and transforms back (real part kept)
    """
    workers = app_settings.FFT_WORKERS
    spectrum = sp_fft.fftn(grid.values, axes=axes, workers=workers)
    spectrum *= multiplier
    result = sp_fft.ifftn(spectrum, axes=axes, workers=workers)
    return grid.with_values(_project_real(grid.spec, result))


def validate_multiplier(values, mu, tolerance=None):
    tolerance = app_settings.UNIT_MODULUS_TOLERANCE if tolerance is None else tolerance
    deviation = float(np.max(np.abs(np.abs(values) - 1.0)))
    if deviation > tolerance:
        raise MultiplierError('multiplier modulus deviates from 1 by {0:.3e}'.format(deviation))
    zero = np.broadcast_to(mu, values.shape) == 0
    if np.any(np.abs(values[zero] - 1.0) > tolerance):
        raise MultiplierError('multiplier must equal 1 at zero frequency')


def hermitian_nyquist(values, axis):
    """
    returns a copy of ``values`` whose Nyquist line along ``axis``
    holds the real part only; a real grid then stays real
    """
    index = _axis_index(axis)
    n = values.shape[index]
    values = np.array(values, dtype=np.complex128, copy=True)
    if n % 2 == 0:
        nyquist = [slice(None)] * values.ndim
        nyquist[index] = n // 2
        values[tuple(nyquist)] = values[tuple(nyquist)].real
    return values


def apply_fourier_multiplier(grid, axis, multiplier):
    """
    applies ``multiplier(mu, transverse)`` line by line along ``axis``;
    ``mu`` and ``transverse`` are handed over as broadcastable arrays
    """
    mu, transverse = line_arguments(grid.spec, axis)
    values = np.broadcast_to(np.asarray(multiplier(mu, transverse), dtype=np.complex128),
                             grid.spec.shape)
    validate_multiplier(values, mu)
    return spectral_apply(grid, hermitian_nyquist(values, axis), axes=(_axis_index(axis),))


def gaussian_convolve(grid, var_q, var_p):
    """
    convolution with a separable Gaussian of variances ``var_q`` and ``var_p``
    """
    if var_q < 0 or var_p < 0:
        raise ValueError('variances must be >= 0')
    if var_q == 0 and var_p == 0:
        return grid.with_values(grid.values)
    spec = grid.spec
    for variance, width, axis in ((var_q, spec.width_q, 'q'), (var_p, spec.width_p, 'p')):
        if 2 * SUPPORT_SIGMAS * math.sqrt(variance) > width:
            raise WindowTooSmallError('a kernel of variance {0} along {1} wraps around a window '
                                      'of width {2}'.format(variance, axis, width))
    mu_q = spec.frequencies(Axis.Q)[:, None]
    mu_p = spec.frequencies(Axis.P)[None, :]
    multiplier = np.exp(-(mu_q ** 2 * var_q + mu_p ** 2 * var_p) / 2)
    return spectral_apply(grid, multiplier, axes=(0, 1))
