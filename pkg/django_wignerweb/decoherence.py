"""
Reservoir effects on phase-space distributions: the purely diffusive
step, the exact Ornstein-Uhlenbeck step, and the closed-form smoothed
propagators used to validate the engine
"""
import logging
import math

import numpy as np
from scipy import fft as sp_fft

from . import settings as app_settings
from .exceptions import DomainError, UndersamplingError, WindowTooSmallError
from .grid import SUPPORT_SIGMAS, Axis, gaussian_convolve
from .params import ChiParams

logger = logging.getLogger(__name__)

F_ENVELOPE_BOUND = 0.081
MAX_CHI = 10.0
CLASSICAL = 'classical'
QUANTUM_APPROX = 'quantum_approx'


def diffusion_step(grid, D):
    """
    Gaussian smoothing with variance 2D per quadrature,
    identical for quantum and classical grids
    """
    if D < 0:
        raise DomainError('D must be >= 0, got {0}'.format(D))
    return gaussian_convolve(grid, 2 * D, 2 * D)


def ou_variance(gamma_tau, nbar, eta):
    """
    variance added per quadrature by one Ornstein-Uhlenbeck step
    """
    return 2 * (nbar + 0.5) * eta ** 2 * (1 - math.exp(-gamma_tau))


def dissipative_variance(sigma0_sq, gamma_tau, nbar, eta):
    """
    closed form of the variance of a Gaussian after one dissipative step
    """
    return sigma0_sq * math.exp(-gamma_tau) + ou_variance(gamma_tau, nbar, eta)


def _green_matrix(coordinate, frequencies, contraction, variance):
    """
    real matrix of the one-dimensional Green function: frequency dilation
    mu -> c mu (contraction about the origin, mass preserving) times the
    Gaussian damping exp(-mu^2 var / 2)
    """
    x_min = coordinate[0]
    damping = np.exp(-frequencies ** 2 * variance / 2) * np.exp(-1j * frequencies * x_min)
    dilated = np.exp(1j * contraction * np.outer(frequencies, coordinate))
    return sp_fft.ifft(damping[:, None] * dilated, axis=0).real


def _fine_scale_fraction(spec, values):
    """
    fraction of spectral power at wavelengths shorter than four cells
    """
    spectrum = np.abs(sp_fft.fft2(values)) ** 2
    total = np.sum(spectrum)
    if total == 0:
        return 0.0
    mu_q = np.abs(spec.frequencies(Axis.Q))[:, None]
    mu_p = np.abs(spec.frequencies(Axis.P))[None, :]
    fine = (mu_q > math.pi / (2 * spec.dq)) | (mu_p > math.pi / (2 * spec.dp))
    return float(np.sum(spectrum * fine) / total)


def dissipative_step(grid, gamma_tau, nbar, eta):
    """
    exact Green-function step of the damped-diffusive Fokker-Planck
    equation over one kick period: contraction by exp(-gamma_tau/2)
    followed by smoothing with variance 2(nbar + 1/2) eta^2 (1 - exp(-gamma_tau))
    """
    if gamma_tau < 0:
        raise DomainError('gamma_tau must be >= 0, got {0}'.format(gamma_tau))
    if gamma_tau == 0:
        return grid.with_values(grid.values)
    spec = grid.spec
    contraction = math.exp(-gamma_tau / 2)
    variance = ou_variance(gamma_tau, nbar, eta)
    for width, axis in ((spec.width_q, 'q'), (spec.width_p, 'p')):
        if 2 * SUPPORT_SIGMAS * math.sqrt(variance) > width:
            raise WindowTooSmallError('reservoir variance {0} along {1} wraps around a window '
                                      'of width {2}'.format(variance, axis, width))
    green_q = _green_matrix(spec.q, spec.frequencies(Axis.Q), contraction, variance)
    green_p = _green_matrix(spec.p, spec.frequencies(Axis.P), contraction, variance)
    values = green_q @ grid.values @ green_p.T
    fine = _fine_scale_fraction(spec, values)
    if fine > app_settings.UNDERSAMPLING_TOLERANCE:
        raise UndersamplingError('contraction by {0:.4f} pushes {1:.2e} of the spectral power below '
                                 'two cells; refine the grid'.format(contraction, fine))
    return grid.with_values(values)


def diffusion_from_reservoir(nbar, gamma_tau, eta):
    """
    per-kick D of the high-temperature limit, with the convention D = nbar * gamma_tau * eta^2
    """
    return nbar * gamma_tau * eta ** 2


def chi(K, eta, D):
    """
    K eta^4 / D^(3/2), equivalently K hbar_eff^2 / 4 D^(3/2)
    """
    if D <= 0:
        raise DomainError('chi is undefined for D <= 0 (got D={0})'.format(D))
    return K * eta ** 4 / D ** 1.5


def f_correction(y):
    return 0.25 * (y - 2 * y ** 3 / 3)


def f_envelope_maximum(y_max=6.0, samples=600001):
    """
    max |f(y) exp(-y^2)| located by a dense scan of [-y_max, y_max]
    """
    y = np.linspace(-y_max, y_max, samples)
    return float(np.max(np.abs(f_correction(y) * np.exp(-y ** 2))))


def smoothed_coordinates(xR, xprime, K, D):
    qR, pR = xR
    q1, p1 = xprime
    width = 2 * math.sqrt(D)
    x = (np.asarray(q1) - qR) / width
    y = (np.asarray(p1) - pR + K * np.sin(q1)) / width
    return x, y


def smoothed_propagator(xR, xprime, params, D, which=CLASSICAL):
    """
    diffusion-smoothed one-kick propagator: the exact classical kernel
    or its first-order quantum correction in chi
    """
    if D <= 0:
        raise DomainError('the smoothed propagator needs D > 0 (got D={0})'.format(D))
    x, y = smoothed_coordinates(xR, xprime, params.K, D)
    classical = np.exp(-(x ** 2 + y ** 2)) / (4 * math.pi * D)
    if which == CLASSICAL:
        return classical
    if which != QUANTUM_APPROX:
        raise ValueError('unknown propagator "{0}"'.format(which))
    chi_params = ChiParams.from_params(params, D)
    if chi_params.chi > MAX_CHI:
        raise DomainError('chi={0:.3g} is beyond the range of the approximation '
                          '(<= {1})'.format(chi_params.chi, MAX_CHI))
    if not chi_params.approximation_valid:
        logger.warning('chi=%.3g > 1: the smoothed quantum approximation is outside its validity',
                       chi_params.chi)
    return classical * (1 + chi_params.chi * np.sin(xprime[0]) * f_correction(y))
